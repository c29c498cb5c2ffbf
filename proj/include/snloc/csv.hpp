#ifndef SNLOC_CSV_HPP
#define SNLOC_CSV_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snloc/detection.hpp"
#include "snloc/estimation.hpp"
#include "snloc/sensor.hpp"

namespace snloc {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& file, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
}

} // namespace detail

// All writers go through a temp file and rename, so partially written outputs
// never appear under the final name.
class AtomicWriter {
public:
    explicit AtomicWriter(const std::filesystem::path& path)
        : path_(path), tmp_(path.string() + ".tmp") {
        out_.open(tmp_);
        if (!out_) throw std::runtime_error("cannot open " + tmp_.string());
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.close();
        std::filesystem::rename(tmp_, path_);
    }

private:
    std::filesystem::path path_, tmp_;
    std::ofstream out_;
};

inline void write_traces_csv(const std::filesystem::path& path, const std::vector<Trace>& traces) {
    if (traces.empty()) throw std::invalid_argument("write_traces_csv: no traces");
    AtomicWriter w(path);
    auto& out = w.stream();
    out << "time_s";
    for (const Trace& t : traces) out << "," << t.node.name();
    out << "\n";
    const std::size_t n = traces.front().samples.size();
    for (const Trace& t : traces)
        if (t.samples.size() != n)
            throw std::invalid_argument("write_traces_csv: traces of unequal length");
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", traces.front().sample_time(i));
        out << buf;
        for (const Trace& t : traces) {
            std::snprintf(buf, sizeof buf, "%.9g", t.samples[i]);
            out << "," << buf;
        }
        out << "\n";
    }
    w.commit();
}

inline std::vector<Trace> read_traces_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    const std::string fname = path.filename().string();
    std::string line;
    if (!std::getline(in, line)) throw ParseError(fname + ":1: empty file");
    const auto header = detail::split_csv_line(line);
    if (header.empty() || header[0] != "time_s")
        throw ParseError(fname + ":1: first column must be time_s");

    std::vector<NodeId> nodes;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h.size() != 3 || h[0] != 'N' || h[1] < '1' || h[2] < '1')
            throw ParseError(fname + ":1: bad node column '" + h + "'");
        NodeId id{h[1] - '0', h[2] - '0'};
        if (id.i == 3 && id.j == 3)
            throw ParseError(fname + ":1: geometry mismatch: N33 is the TX cell, not a sensor");
        nodes.push_back(id);
    }
    if (nodes.empty()) throw ParseError(fname + ":1: no node columns");

    std::vector<double> times;
    std::vector<std::vector<double>> cols(nodes.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(fname + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        const double t = detail::parse_double(fields[0], fname, lineno);
        if (!times.empty() && t <= times.back())
            throw ParseError(fname + ":" + std::to_string(lineno) + ": non-monotone time column");
        times.push_back(t);
        for (std::size_t c = 0; c < nodes.size(); ++c)
            cols[c].push_back(detail::parse_double(fields[c + 1], fname, lineno));
    }
    if (times.size() < 2) throw ParseError(fname + ": need at least 2 samples");

    const double dt = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::fabs(step - dt) > 0.01 * dt)
            throw ParseError(fname + ":" + std::to_string(i + 2) +
                             ": non-uniform sample rate (step " + std::to_string(step) + ")");
    }

    std::vector<Trace> traces;
    for (std::size_t c = 0; c < nodes.size(); ++c) {
        Trace tr;
        tr.node = nodes[c];
        tr.sample_rate = 1.0 / dt;
        tr.samples = std::move(cols[c]);
        traces.push_back(std::move(tr));
    }
    return traces;
}

inline void write_detections_csv(const std::filesystem::path& path,
                                 const std::vector<DetectionResult>& dets) {
    AtomicWriter w(path);
    auto& out = w.stream();
    out << "node,detected,t_s,gamma_v,rho_o_v\n";
    char buf[128];
    for (const DetectionResult& d : dets) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.9g,%.9g,%.9g", d.node.name().c_str(),
                      d.detected ? 1 : 0, d.t, d.gamma, d.rho_o);
        out << buf << "\n";
    }
    w.commit();
}

inline std::vector<DetectionResult> read_detections_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    const std::string fname = path.filename().string();
    std::string line;
    if (!std::getline(in, line) ||
        detail::split_csv_line(line) !=
            std::vector<std::string>{"node", "detected", "t_s", "gamma_v", "rho_o_v"})
        throw ParseError(fname + ":1: bad detection header");
    std::vector<DetectionResult> dets;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 5)
            throw ParseError(fname + ":" + std::to_string(lineno) + ": expected 5 fields");
        if (f[0].size() != 3 || f[0][0] != 'N')
            throw ParseError(fname + ":" + std::to_string(lineno) + ": bad node id '" + f[0] + "'");
        DetectionResult d;
        d.node = {f[0][1] - '0', f[0][2] - '0'};
        d.detected = detail::parse_double(f[1], fname, lineno) != 0.0;
        d.t = detail::parse_double(f[2], fname, lineno);
        d.gamma = detail::parse_double(f[3], fname, lineno);
        d.rho_o = detail::parse_double(f[4], fname, lineno);
        dets.push_back(d);
    }
    return dets;
}

inline void write_estimates_csv(const std::filesystem::path& path,
                                const std::vector<std::pair<int, LocationEstimate>>& rows) {
    AtomicWriter w(path);
    auto& out = w.stream();
    out << "measurement,cluster,pair,x_hat_m,y_hat_m,root2_x_m,root2_y_m\n";
    char buf[192];
    for (const auto& [meas, e] : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.9g,%.9g,%.9g", meas, e.cluster,
                      e.pair_index, e.x_hat, e.y_hat, e.root2_x, e.root2_y);
        out << buf << "\n";
    }
    w.commit();
}

inline void write_taps(const std::filesystem::path& path, const std::vector<double>& taps) {
    AtomicWriter w(path);
    char buf[40];
    for (double t : taps) {
        std::snprintf(buf, sizeof buf, "%.17g", t);
        w.stream() << buf << "\n";
    }
    w.commit();
}

} // namespace snloc

#endif
