#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "hdlsd/autocov.hpp"
#include "hdlsd/io.hpp"
#include "hdlsd/spectra.hpp"
#include "oracles.hpp"

using namespace hdlsd;
using doctest::Approx;

namespace {

PathMatrix real_path(const RealMatrix& x) {
    PathMatrix path;
    path.entries = x;
    path.meta.p = static_cast<std::size_t>(x.rows());
    path.meta.n = static_cast<std::size_t>(x.cols());
    return path;
}

ProcessModel ma1_model(Innovation law = Innovation::RealGaussian) {
    ProcessModel m;
    m.family = CoefficientFamily::moving_average(1);
    m.fa = SpectralParamDistribution({{{0.2}, 0.5}, {{0.8}, 0.5}});
    m.innovation = law;
    return m;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hdlsd_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("autocov") {

TEST_CASE("hand examples") {
    RealMatrix v(3, 1);
    v << 1.0, -2.0, 0.5;
    const auto c0 = std::get<RealMatrix>(sym_autocov(real_path(v), 0).matrix);
    CHECK((c0 - v * v.transpose()).cwiseAbs().maxCoeff() < 1e-15);

    RealMatrix x(1, 3);
    x << 1.0, 2.0, 3.0;
    CHECK(std::get<RealMatrix>(sym_autocov(real_path(x), 0).matrix)(0, 0) == Approx(14.0 / 3.0));
    CHECK(std::get<RealMatrix>(sym_autocov(real_path(x), 1).matrix)(0, 0) == Approx(8.0 / 3.0));

    const auto taper = TaperSpec::geometric(0.5, 2);
    CHECK(std::get<RealMatrix>(tapered_spectral(real_path(x), taper, 0.0).matrix)(0, 0) == Approx(22.0 / 3.0));
}

TEST_CASE("matches direct sums") {
    const auto path = simulate_path(ma1_model(), 6, 25, 1, 3);
    const auto& x = std::get<RealMatrix>(path.entries);
    std::vector<std::vector<double>> rows(6, std::vector<double>(25));
    for (int i = 0; i < 6; ++i)
        for (int t = 0; t < 25; ++t) rows[i][t] = x(i, t);
    for (std::size_t tau : {0u, 1u, 2u, 7u}) {
        const auto c = std::get<RealMatrix>(sym_autocov(path, tau).matrix);
        const auto ref = oracle::sym_autocov(rows, tau);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) CHECK(c(i, j) == Approx(ref[i][j]).epsilon(1e-12));
    }
}

TEST_CASE("invariants") {
    const auto path = simulate_path(ma1_model(Innovation::ComplexGaussian), 10, 40, 2, 19);
    const auto& x = std::get<ComplexMatrix>(path.entries);
    const auto c0 = std::get<ComplexMatrix>(sym_autocov(path, 0).matrix);
    CHECK(c0.trace().real() / 10.0 == Approx(x.squaredNorm() / 400.0).epsilon(1e-13));
    CHECK(hermitian_defect(c0) < 1e-15);

    const auto ev0 = eigenvalues(c0);
    CHECK(ev0.front() >= -1e-12);
    const double norm0 = ev0.back();
    for (std::size_t tau : {1u, 2u, 5u}) {
        const auto m = sym_autocov(path, tau).matrix;
        CHECK(hermitian_defect(m) < 1e-14);
        const auto ev = eigenvalues(m);
        CHECK(std::max(std::abs(ev.front()), std::abs(ev.back())) <= norm0 * (1.0 + 1e-12));
    }

    PathMatrix scaled = path;
    scaled.entries = ComplexMatrix(3.0 * x);
    const auto c1 = std::get<ComplexMatrix>(sym_autocov(path, 1).matrix);
    const auto s1 = std::get<ComplexMatrix>(sym_autocov(scaled, 1).matrix);
    CHECK((s1 - 9.0 * c1).cwiseAbs().maxCoeff() < 1e-12 * c1.cwiseAbs().maxCoeff() * 9.0);

    CHECK_THROWS_AS(sym_autocov(path, 40), std::invalid_argument);
}

TEST_CASE("tapered estimator degenerates to C_0") {
    const auto path = simulate_path(ma1_model(), 8, 30, 1, 5);
    const auto flat = TaperSpec::custom({}, 1);
    // only the lag-0 term survives, so eta drops out and the result stays real
    for (double eta : {0.0, 1.3}) {
        const auto t = tapered_spectral(path, flat, eta).matrix;
        REQUIRE_FALSE(is_complex(t));
        CHECK(std::get<RealMatrix>(t) == std::get<RealMatrix>(sym_autocov(path, 0).matrix));
    }
    const auto geo = tapered_spectral(path, TaperSpec::geometric(0.6, 6), 0.9).matrix;
    CHECK(hermitian_defect(geo) < 1e-14);
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("model json round trip") {
    ProcessModel m;
    m.family = CoefficientFamily::arma11(40);
    m.fa = SpectralParamDistribution({{{0.5, 0.2}, 0.25}, {{-0.1, 0.3}, 0.75}});
    m.scaling = std::vector<double>{1.0, 2.0};
    m.filter = std::vector<double>{1.0, 0.5};
    m.innovation = Innovation::Rademacher;
    m.rotation = Rotation::RandomOrthogonalU;
    const auto j = to_json(m);
    const auto back = model_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(model_hash(back) == model_hash(m));

    ProcessModel other = m;
    other.innovation = Innovation::RealGaussian;
    CHECK(model_hash(other) != model_hash(m));

    CHECK_THROWS(model_from_json(Json::parse(R"({"family":{"kind":"nope"},"atoms":[]})")));
}

TEST_CASE("taper json round trip") {
    for (const auto& t : {TaperSpec::geometric(0.3, 9), TaperSpec::polynomial(2.5, 5), TaperSpec::custom({0.5, 0.25}, 3)}) {
        const auto back = taper_from_json(to_json(t));
        for (int tau = -4; tau <= 10; ++tau) CHECK(back.weight(tau) == t.weight(tau));
    }
}

TEST_CASE("format_double round trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 5e-324}) {
        const auto s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("container round trip") {
    auto model = ma1_model(Innovation::ComplexGaussian);
    const auto path = simulate_path(model, 4, 9, 2, 31, 1);
    const auto file = temp_file("path.bin");
    write_path(file, path);

    std::ifstream is(file, std::ios::binary);
    std::string header;
    std::getline(is, header);
    CHECK(header.rfind("HDLSD1 4 9 2 lag complex 31 ", 0) == 0);
    CHECK(std::filesystem::file_size(file) == header.size() + 1 + 4 * 9 * 16);

    const auto back = read_path(file);
    CHECK(std::get<ComplexMatrix>(back.entries) == std::get<ComplexMatrix>(path.entries));
    CHECK(back.meta.model_hash == model_hash(model));
    CHECK(back.meta.q == 2);

    const auto c = sym_autocov(simulate_path(ma1_model(), 3, 12, 1, 2), 1);
    const auto cfile = temp_file("cov.bin");
    write_container(cfile, {3, 3, 1, "autocov", false, 2, 0xabcULL}, c.matrix);
    const auto contents = read_container(cfile);
    CHECK(contents.header.kind == "autocov");
    CHECK(contents.header.model_hash == 0xabcULL);
    CHECK(std::get<RealMatrix>(contents.entries) == std::get<RealMatrix>(c.matrix));

    std::filesystem::resize_file(cfile, std::filesystem::file_size(cfile) - 8);
    CHECK_THROWS(read_container(cfile));
}

}  // TEST_SUITE
