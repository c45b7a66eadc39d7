#include "hdlsd/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hdlsd {

namespace {

constexpr const char* kMagic = "HDLSD1";

FamilyKind family_kind_from(const std::string& s) {
    if (s == "identity") return FamilyKind::Identity;
    if (s == "ma") return FamilyKind::MovingAverage;
    if (s == "arma11") return FamilyKind::Arma11;
    if (s == "iid_rows") return FamilyKind::IidRows;
    throw std::invalid_argument("unknown family kind '" + s + "'");
}

Innovation innovation_from(const std::string& s) {
    if (s == "real_gaussian") return Innovation::RealGaussian;
    if (s == "complex_gaussian") return Innovation::ComplexGaussian;
    if (s == "rademacher") return Innovation::Rademacher;
    if (s == "uniform") return Innovation::StandardizedUniform;
    throw std::invalid_argument("unknown innovation law '" + s + "'");
}

Rotation rotation_from(const std::string& s) {
    if (s == "identity") return Rotation::IdentityU;
    if (s == "random_orthogonal") return Rotation::RandomOrthogonalU;
    throw std::invalid_argument("unknown rotation '" + s + "'");
}

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
    return v;
}

void put_double(std::ostream& os, double x) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(x));
    os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_double(std::istream& is) {
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if (!is) throw std::runtime_error("container truncated");
    return std::bit_cast<double>(to_le(bits));
}

}  // namespace

Json to_json(const ProcessModel& model) {
    Json family{{"kind", to_string(model.family.kind)}};
    switch (model.family.kind) {
        case FamilyKind::MovingAverage: family["order"] = model.family.q_max; break;
        case FamilyKind::Arma11: family["q_max"] = model.family.q_max; break;
        case FamilyKind::IidRows: family["coefficients"] = model.family.shared; break;
        case FamilyKind::Identity: break;
    }
    Json atoms = Json::array();
    for (const auto& atom : model.fa.atoms()) atoms.push_back({{"lambda", atom.lambda}, {"weight", atom.weight}});
    Json doc{{"family", family},
             {"atoms", atoms},
             {"innovation", to_string(model.innovation)},
             {"rotation", to_string(model.rotation)}};
    if (model.scaling) doc["scaling"] = *model.scaling;
    if (model.filter) doc["filter"] = *model.filter;
    return doc;
}

ProcessModel model_from_json(const Json& doc) {
    ProcessModel model;
    const Json& fam = doc.at("family");
    const auto kind = family_kind_from(fam.at("kind").get<std::string>());
    switch (kind) {
        case FamilyKind::Identity: model.family = CoefficientFamily::identity(); break;
        case FamilyKind::MovingAverage:
            model.family = CoefficientFamily::moving_average(fam.at("order").get<std::size_t>());
            break;
        case FamilyKind::Arma11:
            model.family = CoefficientFamily::arma11(fam.value("q_max", std::size_t{64}));
            break;
        case FamilyKind::IidRows:
            model.family = CoefficientFamily::iid_rows(fam.at("coefficients").get<std::vector<double>>());
            break;
    }
    std::vector<Atom> atoms;
    for (const auto& a : doc.at("atoms"))
        atoms.push_back({a.at("lambda").get<std::vector<double>>(), a.at("weight").get<double>()});
    model.fa = SpectralParamDistribution(std::move(atoms));
    if (doc.contains("scaling")) model.scaling = doc["scaling"].get<std::vector<double>>();
    if (doc.contains("filter")) model.filter = doc["filter"].get<std::vector<double>>();
    model.innovation = innovation_from(doc.value("innovation", std::string("real_gaussian")));
    model.rotation = rotation_from(doc.value("rotation", std::string("identity")));
    return model;
}

Json to_json(const TaperSpec& taper) {
    Json doc{{"kind", to_string(taper.kind)}, {"horizon", taper.horizon}};
    switch (taper.kind) {
        case TaperKind::Geometric: doc["beta"] = taper.parameter; break;
        case TaperKind::Polynomial: doc["alpha"] = taper.parameter; break;
        case TaperKind::TruncatedCustom: doc["table"] = taper.table; break;
    }
    return doc;
}

TaperSpec taper_from_json(const Json& doc) {
    const auto kind = doc.at("kind").get<std::string>();
    const auto horizon = doc.at("horizon").get<std::size_t>();
    if (kind == "geometric") return TaperSpec::geometric(doc.at("beta").get<double>(), horizon);
    if (kind == "polynomial") return TaperSpec::polynomial(doc.at("alpha").get<double>(), horizon);
    if (kind == "custom") return TaperSpec::custom(doc.at("table").get<std::vector<double>>(), horizon);
    throw std::invalid_argument("unknown taper kind '" + kind + "'");
}

std::uint64_t model_hash(const ProcessModel& model) {
    const std::string text = to_json(model).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_container(const std::filesystem::path& file, const ContainerHeader& header,
                     const DenseMatrix& entries) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    os << kMagic << ' ' << header.p << ' ' << header.n << ' ' << header.q << ' ' << header.kind << ' '
       << (is_complex(entries) ? "complex" : "real") << ' ' << header.seed << ' ' << std::hex
       << std::setw(16) << std::setfill('0') << header.model_hash << std::dec << '\n';
    std::visit(
        [&](const auto& m) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                for (Eigen::Index i = 0; i < m.rows(); ++i) {
                    if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ComplexMatrix>) {
                        put_double(os, m(i, j).real());
                        put_double(os, m(i, j).imag());
                    } else {
                        put_double(os, m(i, j));
                    }
                }
            }
        },
        entries);
    if (!os) throw std::runtime_error("failed writing " + file.string());
}

ContainerContents read_container(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::getline(is, line);
    std::istringstream hs(line);
    std::string magic, flag, hash;
    ContainerContents out;
    auto& h = out.header;
    hs >> magic >> h.p >> h.n >> h.q >> h.kind >> flag >> h.seed >> hash;
    if (!hs || magic != kMagic) throw std::runtime_error(file.string() + ": not an HDLSD1 container");
    if (flag != "real" && flag != "complex") throw std::runtime_error("bad real/complex flag " + flag);
    h.complex_valued = flag == "complex";
    h.model_hash = std::stoull(hash, nullptr, 16);
    const auto r = static_cast<Eigen::Index>(h.p);
    const auto c = static_cast<Eigen::Index>(h.n);
    if (h.complex_valued) {
        ComplexMatrix m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) {
                const double re = get_double(is);
                m(i, j) = {re, get_double(is)};
            }
        out.entries = std::move(m);
    } else {
        RealMatrix m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = get_double(is);
        out.entries = std::move(m);
    }
    return out;
}

void write_path(const std::filesystem::path& file, const PathMatrix& path) {
    ContainerHeader h{path.meta.p, path.meta.n, path.meta.q, to_string(path.kind), path.is_complex(),
                      path.meta.seed, path.meta.model_hash};
    write_container(file, h, path.entries);
}

PathMatrix read_path(const std::filesystem::path& file) {
    auto contents = read_container(file);
    const auto& h = contents.header;
    if (h.kind != "lag" && h.kind != "circulant")
        throw std::runtime_error(file.string() + " holds a '" + h.kind + "' matrix, not a path");
    PathMatrix path;
    path.entries = std::move(contents.entries);
    path.kind = h.kind == "lag" ? PathKind::Lag : PathKind::Circulant;
    path.meta = {h.p, h.n, h.q, h.seed, 0, h.model_hash};
    return path;
}

}  // namespace hdlsd
