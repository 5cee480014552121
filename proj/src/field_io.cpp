#include "vortex/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace vortex {

namespace {

std::string exact(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::uint64_t to_little(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(bits);
    return bits;
}

}  // namespace

std::string field_header(const Grid& grid) {
    return "VXF1 nx=" + std::to_string(grid.nx()) + " ny=" + std::to_string(grid.ny()) + " lx=" + exact(grid.lx()) +
           " ly=" + exact(grid.ly()) + " kind=" + to_string(grid.kind());
}

void write_field(std::ostream& os, const Field& f) {
    os << field_header(f.grid()) << '\n';
    std::vector<char> bytes(f.size() * 8);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(f[k]));
        std::memcpy(bytes.data() + 8 * k, &bits, 8);
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_field(const std::filesystem::path& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    write_field(os, f);
    if (!os) throw ConfigError("failed writing " + path.string());
}

Field read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ConfigError("field dump: missing header line");
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "VXF1") throw ConfigError("field dump: bad magic '" + magic + "'");
    std::map<std::string, std::string> kv;
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("field dump: malformed header token '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    for (const char* key : {"nx", "ny", "lx", "ly", "kind"})
        if (!kv.count(key)) throw ConfigError(std::string("field dump: header lacks ") + key);
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    try {
        nx = std::stoi(kv["nx"]);
        ny = std::stoi(kv["ny"]);
        lx = std::stod(kv["lx"]);
        ly = std::stod(kv["ly"]);
    } catch (const std::exception&) {
        throw ConfigError("field dump: non-numeric header value");
    }
    GridPtr grid;
    if (kv["kind"] == "periodic") {
        grid = Grid::periodic(lx, ly, nx, ny);
    } else if (kv["kind"] == "planar") {
        if (lx != ly) throw ConfigError("field dump: planar boxes are square");
        grid = Grid::planar(lx / 2.0, nx, ny);
    } else {
        throw ConfigError("field dump: unknown kind '" + kv["kind"] + "'");
    }
    std::vector<char> bytes(grid->size() * 8);
    is.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(is.gcount()) != bytes.size()) throw ConfigError("field dump: truncated payload");
    std::vector<double> samples(grid->size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        std::uint64_t bits;
        std::memcpy(&bits, bytes.data() + 8 * k, 8);
        samples[k] = std::bit_cast<double>(to_little(bits));
    }
    return Field(grid, std::move(samples));
}

Field read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path.string());
    return read_field(is);
}

}  // namespace vortex
