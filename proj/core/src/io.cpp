#include "thermoline/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace thermoline::io {

namespace {

const char* probe_name(meas::ProbeKind k) {
    return k == meas::ProbeKind::spin_energy ? "spin_energy" : "boson_occupation";
}

std::string header_comment(std::uint64_t config_hash) {
    return "# config_hash=" + hash_hex(config_hash) + "\n";
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                                 ec.message());
    }
}

std::string grid_csv(const infer::PosteriorGrid& grid, std::uint64_t config_hash) {
    std::string out = header_comment(config_hash);
    out += "lambda,theta,density\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += format_value(grid.lambdas[i]);
        out += ',';
        out += format_value(grid.thetas[i]);
        out += ',';
        out += format_value(grid.density(i));
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const sim::TrajectoryRecord& rec, std::uint64_t config_hash) {
    const std::size_t n = rec.outcomes.size();
    if (rec.gaps.size() != n || rec.estimates_msd.size() != n || rec.estimates_msle.size() != n ||
        rec.msd_curve.size() != n || rec.msle_curve.size() != n)
        throw std::invalid_argument("trajectory record sequences have mismatched lengths");
    std::string out = header_comment(config_hash);
    out += "step,outcome,theta_hat_msd,theta_hat_msle,msd,msle,eps_adapted\n";
    for (std::size_t i = 0; i < n; ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += std::to_string(rec.outcomes[i]);
        out += ',';
        out += format_value(rec.estimates_msd[i]);
        out += ',';
        out += format_value(rec.estimates_msle[i]);
        out += ',';
        out += format_value(rec.msd_curve[i]);
        out += ',';
        out += format_value(rec.msle_curve[i]);
        out += ',';
        out += format_value(rec.gaps[i]);
        out += '\n';
    }
    return out;
}

std::string ensemble_csv(const sim::EnsembleSummary& s, std::uint64_t config_hash) {
    std::string out = header_comment(config_hash);
    out += "nu,emsd,emsle,ecrb,bcrb\n";
    for (std::size_t j = 0; j < s.nu_grid.size(); ++j) {
        out += std::to_string(s.nu_grid[j]);
        out += ',';
        out += format_value(s.emsd[j]);
        out += ',';
        out += format_value(s.emsle[j]);
        out += ',';
        out += format_value(s.ecrb[j]);
        out += ',';
        out += format_value(s.bcrb[j]);
        out += '\n';
    }
    return out;
}

std::string bounds_csv(const std::vector<bounds::BoundReport>& rows, std::uint64_t config_hash) {
    std::string out = header_comment(config_hash);
    out += "nu,ecrb,bcrb,tbcrb,tbcrb_std_error,q_prior,q_prior_flagged,tbcrb_flagged\n";
    for (const auto& r : rows) {
        out += std::to_string(r.repetitions);
        out += ',';
        out += format_value(r.ecrb);
        out += ',';
        out += format_value(r.bcrb);
        out += ',';
        out += format_value(r.tbcrb);
        out += ',';
        out += format_value(r.mc_std_error);
        out += ',';
        out += format_value(r.q_prior);
        out += ',';
        out += r.q_prior_flagged ? '1' : '0';
        out += ',';
        out += r.tbcrb_flagged ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string bounds_json(const std::vector<bounds::BoundReport>& rows, std::uint64_t config_hash) {
    nlohmann::ordered_json doc;
    doc["config_hash"] = hash_hex(config_hash);
    doc["bounds"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["nu"] = r.repetitions;
        row["ecrb"] = r.ecrb;
        row["bcrb"] = r.bcrb;
        row["tbcrb"] = r.tbcrb;
        row["tbcrb_std_error"] = r.mc_std_error;
        row["q_prior"] = r.q_prior;
        row["q_prior_flagged"] = r.q_prior_flagged;
        row["tbcrb_flagged"] = r.tbcrb_flagged;
        row["reference"] = models::kind_name(r.reference.kind);
        nlohmann::ordered_json probe;
        probe["kind"] = probe_name(r.measurement.kind);
        probe["gap"] = r.measurement.probe_gap;
        if (r.measurement.kind == meas::ProbeKind::spin_energy)
            probe["batch_size"] = r.measurement.batch_size;
        else
            probe["cutoff"] = r.measurement.occupation_cutoff;
        row["measurement"] = probe;
        doc["bounds"].push_back(row);
    }
    return doc.dump(2) + "\n";
}

}  // namespace thermoline::io
