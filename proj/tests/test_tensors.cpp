#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <piezocell/errors.hpp>
#include <piezocell/tensors.hpp>

#include "fixtures.hpp"

using namespace piezocell;

TEST_CASE("voigt index tables are inverse to each other") {
    for (int I = 0; I < 6; ++I) {
        auto [i, j] = voigt_pair(I);
        CHECK(voigt_index(i, j) == I);
        CHECK(voigt_index(j, i) == I);
        CHECK(i <= j);
    }
    CHECK(voigt_index(0, 0) == 0);
    CHECK(voigt_index(1, 1) == 1);
    CHECK(voigt_index(2, 2) == 2);
    CHECK(voigt_index(1, 2) == 3);
    CHECK(voigt_index(0, 2) == 4);
    CHECK(voigt_index(0, 1) == 5);
}

TEST_CASE("elastic tensor writes all symmetry images") {
    ElasticTensor c;
    c.set(0, 1, 2, 2, 3.5);
    CHECK(c(0, 1, 2, 2) == 3.5);
    CHECK(c(1, 0, 2, 2) == 3.5);
    CHECK(c(2, 2, 0, 1) == 3.5);
    CHECK(c(2, 2, 1, 0) == 3.5);
}

TEST_CASE("isotropic tensor has the Lame structure") {
    const double lambda = 2.25, mu = 0.75;
    ElasticTensor c = ElasticTensor::isotropic(lambda, mu);
    CHECK(c(0, 0, 0, 0) == doctest::Approx(lambda + 2 * mu).epsilon(1e-15));
    CHECK(c(0, 0, 1, 1) == doctest::Approx(lambda).epsilon(1e-15));
    CHECK(c(0, 1, 0, 1) == doctest::Approx(mu).epsilon(1e-15));
    CHECK(c(0, 1, 1, 0) == doctest::Approx(mu).epsilon(1e-15));
    CHECK(c(0, 1, 0, 2) == 0.0);
}

TEST_CASE("voigt round trip preserves the elastic tensor") {
    MaterialTensors m = pzt::skewed_material();
    Matrix6d v = voigt_pack(m.c);
    ElasticTensor back = voigt_unpack(v);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    CHECK(back(i, j, k, l) ==
                          doctest::Approx(m.c(i, j, k, l)).epsilon(1e-15));
    // No factor-of-two convention anywhere: the 1212 entry lands verbatim.
    CHECK(v(5, 5) == m.c(0, 1, 0, 1));
    CHECK(v(3, 3) == m.c(1, 2, 1, 2));
}

TEST_CASE("asymmetric voigt input is rejected") {
    Matrix6d v = Matrix6d::Identity();
    v(0, 1) = 0.5;
    v(1, 0) = 0.5 + 1e-6;
    CHECK_THROWS_AS(voigt_unpack(v), NonSymmetricInput);
}

TEST_CASE("piezo voigt round trip") {
    MaterialTensors m = pzt::coupled_material();
    Matrix36d v = voigt_pack(m.e);
    CHECK(v(2, 0) == 0.4);
    CHECK(v(2, 2) == 0.9);
    CHECK(v(0, 4) == 0.55); // pair 13 sits in column 4
    CHECK(v(1, 3) == 0.55); // pair 23 sits in column 3
    PiezoTensor back = voigt_unpack_piezo(v);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(back(k, i, j) == m.e(k, i, j));
}

TEST_CASE("material certificate matches hand-computed eigenvalues") {
    MaterialTensors m = pzt::coupled_material();
    MaterialCertificate cert = validate_material(m, 0.5, 0.5);
    CHECK(cert.ok);
    // Isotropic lambda = mu = 1: Voigt spectrum {3 lambda + 2 mu, 2 mu, 2 mu,
    // mu, mu, mu}; minimum is mu = 1. Unit dielectric: minimum 1.
    CHECK(cert.min_eig_c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.min_eig_d == doctest::Approx(1.0).epsilon(1e-12));

    // Demanding more ellipticity than the material has must fail it.
    MaterialCertificate strict = validate_material(m, 1.5, 0.5);
    CHECK_FALSE(strict.ok);
}

TEST_CASE("indefinite material is rejected by the certificate") {
    MaterialTensors m = pzt::coupled_material();
    m.d.set(0, 0, -1.0);
    MaterialCertificate cert = validate_material(m, 0.0, 0.0);
    CHECK_FALSE(cert.ok);
    CHECK(cert.min_eig_d < 0.0);
}

TEST_CASE("effective tensor symmetrization averages major pairs") {
    EffectiveTensors t;
    t.c(0, 0, 1, 1) = 2.0;
    t.c(1, 1, 0, 0) = 4.0;
    t.c(0, 0, 0, 0) = 5.0;
    ElasticTensor cs = t.c_symmetrized();
    CHECK(cs(0, 0, 1, 1) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(cs(1, 1, 0, 0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(cs(0, 0, 0, 0) == 5.0);

    t.d(0, 1) = 1.0;
    t.d(1, 0) = 3.0;
    DielectricTensor ds = t.d_symmetrized();
    CHECK(ds(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(ds(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("structural defects measure what they claim") {
    EffectiveTensors t;
    // Symmetric data first: all defects zero.
    for (int I = 0; I < 6; ++I) {
        auto [i, j] = voigt_pair(I);
        t.c(i, j, i, j) = 2.0;
        t.c(j, i, j, i) = 2.0;
        t.c(i, j, j, i) = 2.0;
        t.c(j, i, i, j) = 2.0;
    }
    for (int i = 0; i < 3; ++i) t.d(i, i) = 1.0;
    EffectiveDiagnostics d0 = tensor_defects(t);
    CHECK(d0.cH_major_symmetry_defect == 0.0);
    CHECK(d0.dH_symmetry_defect == 0.0);
    CHECK(d0.eH_fH_defect == 0.0); // zero tensors agree exactly
    CHECK(d0.cH_min_eigenvalue > 0.0);
    CHECK(d0.dH_min_eigenvalue == doctest::Approx(1.0).epsilon(1e-12));

    // Now break the major symmetry and the eH = fH identity measurably.
    t.c(0, 0, 1, 1) = 1.0;
    t.c(1, 1, 0, 0) = 2.0;
    t.e(0, 0, 0) = 1.0;
    t.f(0, 0, 0) = 1.5;
    EffectiveDiagnostics d1 = tensor_defects(t);
    CHECK(d1.cH_major_symmetry_defect > 1e-3);
    CHECK(d1.eH_fH_defect > 0.1);
}

TEST_CASE("scaled bundle multiplies every tensor") {
    MaterialTensors m = pzt::coupled_material();
    MaterialTensors s = m.scaled(7.0);
    CHECK(s.c(0, 0, 0, 0) == doctest::Approx(7.0 * m.c(0, 0, 0, 0)));
    CHECK(s.e(2, 2, 2) == doctest::Approx(7.0 * m.e(2, 2, 2)));
    CHECK(s.d(1, 1) == doctest::Approx(7.0 * m.d(1, 1)));
}
