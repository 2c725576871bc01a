#pragma once

// Text and JSON serialization plus a deterministic CSV writer.  Floating
// point is always formatted with %.17g so byte-identical reruns are a
// property of the data, not the stream state.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilcircle/group.hpp"
#include "nilcircle/sparse.hpp"

namespace nilcircle {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_complex(Complex v) {
    return "(" + format_double(v.real()) + "," + format_double(v.imag()) + ")";
}

// Line-oriented text form: one "coords -> (re,im)" per line, sorted.
inline std::string to_text(const SparseFunction& f) {
    std::string out = "# sparse d=" + std::to_string(f.shape().degree()) + " n=" +
                      std::to_string(f.support_size()) + "\n";
    for (const auto& [g, v] : f.items_sorted())
        out += to_text(g) + " -> " + format_complex(v) + "\n";
    return out;
}

inline SparseFunction sparse_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    SparseFunction f;
    bool have_shape = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        size_t arrow = line.find(" -> ");
        if (arrow == std::string::npos) throw std::invalid_argument("sparse_from_text: bad line");
        LatticeElement g = element_from_text(line.substr(0, arrow));
        if (!have_shape) {
            f = SparseFunction(g.shape);
            have_shape = true;
        }
        std::string val = line.substr(arrow + 4);
        size_t comma = val.find(',');
        double re = std::stod(val.substr(1, comma - 1));
        double im = std::stod(val.substr(comma + 1, val.size() - comma - 2));
        f.add(g, Complex(re, im));
    }
    return f;
}

inline nlohmann::ordered_json to_json(const SparseFunction& f) {
    nlohmann::ordered_json j;
    j["d"] = f.shape().degree();
    j["support"] = f.support_size();
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& [g, v] : f.items_sorted()) {
        nlohmann::ordered_json e;
        std::vector<std::string> coords;
        for (const auto& c : g.coords) coords.push_back(c.str());
        e["coords"] = coords;
        e["re"] = v.real();
        e["im"] = v.imag();
        entries.push_back(e);
    }
    j["entries"] = entries;
    return j;
}

// CSV with "# key: value" header comments, then a header row and data rows.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void meta(const std::string& key, const std::string& value) {
        meta_ += "# " + key + ": " + value + "\n";
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size()) throw std::invalid_argument("CsvWriter: cell count");
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ",";
            body_ += cells[i];
        }
        body_ += "\n";
    }

    std::string str() const {
        std::string head;
        for (size_t i = 0; i < columns_.size(); ++i) {
            if (i) head += ",";
            head += columns_[i];
        }
        return meta_ + head + "\n" + body_;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("CsvWriter: cannot open " + path);
        out << str();
        if (!out) throw std::runtime_error("CsvWriter: write failed for " + path);
    }

private:
    std::vector<std::string> columns_;
    std::string meta_, body_;
};

} // namespace nilcircle
