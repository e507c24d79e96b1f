#include "pacs/artifact.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "pacs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "artifact format is declared little-endian; add byte swapping for this platform");

namespace pacs {
namespace {

constexpr char kMagic[4] = {'P', 'A', 'C', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError(path + ": truncated artifact");
    return v;
}

void put_doubles(std::ofstream& out, const std::vector<double>& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
}

std::vector<double> get_doubles(std::ifstream& in, const std::string& path) {
    const auto n = get<std::uint64_t>(in, path);
    if (n > (1ull << 32)) throw ParseError(path + ": implausible array length");
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 8));
    if (!in) throw ParseError(path + ": truncated artifact");
    return v;
}

}  // namespace

void save_field(const std::string& path, const ValueField& field, std::uint64_t model_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, model_hash);
    const Grid& g = field.grid;
    put(out, g.w_min);
    put(out, g.w_max);
    put(out, g.y_min);
    put(out, g.y_max);
    put(out, g.t_max);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_w));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_y));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_t));

    const ThetaTable& t = field.theta;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.size()));
    for (int k = 0; k < t.size(); ++k) put(out, t.control(k));
    for (int k = 0; k < t.size(); ++k) put(out, t.value(k));
    for (int k = 0; k < t.size(); ++k) put<std::uint8_t>(out, t.incentivizable(k) ? 1 : 0);

    put_doubles(out, field.phi);
    put_doubles(out, field.policy_u);
    put_doubles(out, field.policy_pi);
    if (!out) throw ParseError(path + ": write failed");
}

LoadedField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ParseError(path + ": not a PACF artifact");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kVersion)
        throw ParseError(path + ": unsupported artifact version " + std::to_string(version));

    LoadedField lf;
    lf.model_hash = get<std::uint64_t>(in, path);
    Grid g;
    g.w_min = get<double>(in, path);
    g.w_max = get<double>(in, path);
    g.y_min = get<double>(in, path);
    g.y_max = get<double>(in, path);
    g.t_max = get<double>(in, path);
    g.n_w = static_cast<int>(get<std::uint32_t>(in, path));
    g.n_y = static_cast<int>(get<std::uint32_t>(in, path));
    g.n_t = static_cast<int>(get<std::uint32_t>(in, path));
    lf.field.grid = g;

    const auto na = get<std::uint32_t>(in, path);
    std::vector<double> controls(na), thetas(na);
    std::vector<bool> ok(na);
    for (auto& c : controls) c = get<double>(in, path);
    for (auto& th : thetas) th = get<double>(in, path);
    for (std::uint32_t k = 0; k < na; ++k) ok[k] = get<std::uint8_t>(in, path) != 0;
    lf.field.theta = ThetaTable(std::move(controls), std::move(thetas), std::move(ok));

    lf.field.phi = get_doubles(in, path);
    lf.field.policy_u = get_doubles(in, path);
    lf.field.policy_pi = get_doubles(in, path);

    const std::size_t slice = static_cast<std::size_t>(g.n_w) * g.n_y;
    if (lf.field.phi.size() != (static_cast<std::size_t>(g.n_t) + 1) * slice ||
        lf.field.policy_u.size() != static_cast<std::size_t>(g.n_t) * slice ||
        lf.field.policy_pi.size() != static_cast<std::size_t>(g.n_t) * slice)
        throw ParseError(path + ": array sizes inconsistent with grid header");
    return lf;
}

}  // namespace pacs
