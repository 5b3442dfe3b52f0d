#pragma once

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/grid.hpp"

namespace nlc {

// Little-endian binary field format:
//   bytes 0..3   magic "NLF1"
//   int32        dimension n
//   int32 x n    nodes per axis
//   int32        component count
//   float64 ...  values, row-major, one component plane after another
// Grid bounds travel out of band (CLI flags); the format stores shape only.
inline void write_nlf(const GridField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_nlf: cannot open " + path);
    out.write("NLF1", 4);
    auto put_i32 = [&](std::int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    put_i32(field.grid.n);
    for (int a = 0; a < field.grid.n; ++a) put_i32(field.grid.cells);
    put_i32(field.components);
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!out) throw IoError("write_nlf: short write to " + path);
}

inline GridField read_nlf(const std::string& path, double lo, double hi) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_nlf: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NLF1", 4) != 0) throw IoError("read_nlf: bad magic in " + path);
    auto get_i32 = [&]() {
        std::int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    GridSpec grid;
    grid.n = get_i32();
    if (grid.n != 1 && grid.n != 2) throw IoError("read_nlf: unsupported dimension");
    grid.lo = lo;
    grid.hi = hi;
    int cells = 0;
    for (int a = 0; a < grid.n; ++a) {
        int c = get_i32();
        if (a == 0) cells = c;
        else if (c != cells) throw IoError("read_nlf: non-cubic grids not supported");
    }
    grid.cells = cells;
    int components = get_i32();
    if (!in || components < 1 || components > 2) throw IoError("read_nlf: bad component count");
    GridField field = GridField::zeros(grid, components);
    in.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!in) throw IoError("read_nlf: truncated file " + path);
    return field;
}

// CSV writer with '#'-prefixed config stamp lines. Values are printed with
// %.17g so identical runs produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw IoError("CsvWriter: cannot open " + path);
    }

    void comment(const std::string& key, const std::string& value) {
        out_ << "# " << key << "=" << value << "\n";
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out_ << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    }

    void row(const std::vector<double>& vals) {
        char buf[32];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            out_ << buf << (i + 1 < vals.size() ? "," : "\n");
        }
    }

    void raw(const std::string& line) { out_ << line << "\n"; }

private:
    std::ofstream out_;
};

inline void write_field_csv(const GridField& field, const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& stamps = {}) {
    CsvWriter csv(path);
    for (auto& [k, v] : stamps) csv.comment(k, v);
    std::vector<std::string> cols;
    for (int a = 0; a < field.grid.n; ++a) cols.push_back("x" + std::to_string(a));
    for (int c = 0; c < field.components; ++c) cols.push_back("v" + std::to_string(c));
    csv.header(cols);
    const std::size_t count = field.grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = field.grid.point(lin);
        std::vector<double> vals;
        for (int a = 0; a < field.grid.n; ++a) vals.push_back(x[a]);
        for (int c = 0; c < field.components; ++c) vals.push_back(field.at(lin, c));
        csv.row(vals);
    }
}

} // namespace nlc
