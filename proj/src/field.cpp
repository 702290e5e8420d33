#include "cqnls/field.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts unsupported");

namespace cqnls {

namespace {
constexpr const char* kMagic = "CQNLS-FIELD v1";
}

bool Field2D::all_finite() const {
    for (const cplx& z : v_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

void save_field(const Field2D& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_field: cannot open " + path);
    nlohmann::json hdr{{"n", u.spec().n}, {"half_width", u.spec().half_width}};
    out << kMagic << '\n' << hdr.dump() << '\n';
    out.write(reinterpret_cast<const char*>(u.data()),
              static_cast<std::streamsize>(u.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("save_field: write failed for " + path);
}

Field2D load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_field: cannot open " + path);
    std::string magic, hdr_line;
    std::getline(in, magic);
    if (magic != kMagic)
        throw std::runtime_error("load_field: bad magic in " + path + " (got '" + magic + "')");
    std::getline(in, hdr_line);
    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(hdr_line);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_field: bad header JSON in " + path + ": " + e.what());
    }
    GridSpec spec = make_grid(hdr.at("n").get<int>(), hdr.at("half_width").get<double>());
    Field2D u(spec);
    in.read(reinterpret_cast<char*>(u.data()),
            static_cast<std::streamsize>(u.size() * sizeof(cplx)));
    if (in.gcount() != static_cast<std::streamsize>(u.size() * sizeof(cplx)))
        throw std::runtime_error("load_field: truncated payload in " + path);
    return u;
}

}  // namespace cqnls
