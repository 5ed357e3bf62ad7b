#include "mdred/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace mdred::io {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'M', 'D', 'R', 'X'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

void write_matrix(const Matrix& m, const fs::path& path, Dtype dtype) {
    if (!m.allFinite()) throw DataError("refusing to write non-finite matrix to " + path.string());

    std::string buf;
    buf.reserve(23 + static_cast<std::size_t>(m.size()) * (dtype == Dtype::F64 ? 8 : 1));
    buf.append(kMagic, 4);
    put_u16(buf, kVersion);
    buf.push_back(static_cast<char>(dtype));
    put_u64(buf, static_cast<std::uint64_t>(m.rows()));
    put_u64(buf, static_cast<std::uint64_t>(m.cols()));

    if (dtype == Dtype::F64) {
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j)
                put_u64(buf, std::bit_cast<std::uint64_t>(m(i, j)));
    } else {
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) {
                const double v = m(i, j);
                if (v != 0.0 && v != 1.0)
                    throw DataError("u8 dtype requires binary entries, found " +
                                    format_full(v) + " at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
                buf.push_back(v == 1.0 ? 1 : 0);
            }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

Matrix read_matrix(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());

    if (buf.size() < 23) throw DataError(path.string() + ": truncated MDRX header");
    if (std::memcmp(p, kMagic, 4) != 0) throw DataError(path.string() + ": bad MDRX magic");
    const std::uint16_t version = get_u16(p + 4);
    if (version != kVersion)
        throw DataError(path.string() + ": unsupported MDRX version " + std::to_string(version));
    const std::uint8_t dtype = p[6];
    if (dtype > 1) throw DataError(path.string() + ": unknown MDRX dtype tag");
    const std::uint64_t rows = get_u64(p + 7);
    const std::uint64_t cols = get_u64(p + 15);
    if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / 8 / cols)
        throw DataError(path.string() + ": declared shape overflows");

    const std::uint64_t n = rows * cols;
    const std::uint64_t expected = 23 + n * (dtype == 0 ? 8 : 1);
    if (buf.size() < expected)
        throw DataError(path.string() + ": truncated MDRX payload (" +
                        std::to_string(buf.size()) + " bytes, expected " +
                        std::to_string(expected) + ")");

    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    const unsigned char* q = p + 23;
    if (dtype == 0) {
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j, q += 8)
                m(i, j) = std::bit_cast<double>(get_u64(q));
        if (!m.allFinite()) throw DataError(path.string() + ": non-finite entries in payload");
    } else {
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j, ++q)
                m(i, j) = (*q != 0) ? 1.0 : 0.0;
    }
    return m;
}

std::string format_full(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    return tmp;
}

void write_csv_matrix(const Matrix& m, const fs::path& path) {
    if (!m.allFinite()) throw DataError("refusing to write non-finite matrix to " + path.string());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_full(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed for " + path.string());
}

Matrix read_csv_matrix(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string tok = line.substr(pos, comma - pos);
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw DataError(path.string() + ": unparsable token '" + tok + "'");
            row.push_back(v);
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(path.string() + ": ragged row with " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": CSV has zero rows");

    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    if (!m.allFinite()) throw DataError(path.string() + ": non-finite entries");
    return m;
}

std::vector<std::string> read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    return names;
}

void write_manifest(const std::vector<std::string>& names, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (const auto& n : names) out << n << '\n';
}

namespace {

std::string traj_filename(std::size_t i) {
    char tmp[32];
    std::snprintf(tmp, sizeof(tmp), "traj_%05zu.mdrx", i);
    return tmp;
}

}  // namespace

void write_trajectory_set(const TrajectorySet& ts, const fs::path& dir, Dtype dtype) {
    validate(ts);
    fs::create_directories(dir);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < ts.trajectories.size(); ++i) {
        names.push_back(traj_filename(i));
        write_matrix(ts.trajectories[i], dir / names.back(), dtype);
    }
    write_manifest(names, dir / "manifest.txt");
}

TrajectorySet read_trajectory_set(const fs::path& dir) {
    TrajectorySet ts;
    for (const auto& name : read_manifest(dir / "manifest.txt"))
        ts.trajectories.push_back(read_matrix(dir / name));
    validate(ts);
    return ts;
}

void write_discrete_trajectories(const std::vector<std::vector<int>>& dtrajs,
                                 const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < dtrajs.size(); ++i) {
        char tmp[32];
        std::snprintf(tmp, sizeof(tmp), "dtraj_%05zu.txt", i);
        names.emplace_back(tmp);
        std::ofstream out(dir / names.back(), std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + (dir / names.back()).string());
        for (int s : dtrajs[i]) out << s << '\n';
    }
    write_manifest(names, dir / "manifest.txt");
}

std::vector<std::vector<int>> read_discrete_trajectories(const fs::path& dir) {
    std::vector<std::vector<int>> dtrajs;
    for (const auto& name : read_manifest(dir / "manifest.txt")) {
        std::ifstream in(dir / name, std::ios::binary);
        if (!in) throw DataError("cannot open " + (dir / name).string());
        std::vector<int> dtraj;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            char* end = nullptr;
            const long v = std::strtol(line.c_str(), &end, 10);
            if (end == line.c_str() || *end != '\0' || v < 0)
                throw DataError((dir / name).string() + ": bad state index '" + line + "'");
            dtraj.push_back(static_cast<int>(v));
        }
        if (dtraj.empty()) throw DataError((dir / name).string() + ": empty discrete trajectory");
        dtrajs.push_back(std::move(dtraj));
    }
    if (dtrajs.empty()) throw DataError(dir.string() + ": no discrete trajectories listed");
    return dtrajs;
}

KeyValues read_key_values(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    KeyValues kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ": expected key=value, got '" + line + "'");
        kv.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return kv;
}

void write_key_values(const KeyValues& kv, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

const std::string* find_key(const KeyValues& kv, const std::string& key) {
    for (const auto& [k, v] : kv)
        if (k == key) return &v;
    return nullptr;
}

std::string require_key(const KeyValues& kv, const std::string& key, const fs::path& origin) {
    if (const auto* v = find_key(kv, key)) return *v;
    throw DataError(origin.string() + ": missing required key '" + key + "'");
}

}  // namespace mdred::io
