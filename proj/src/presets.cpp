#include "semiflow/presets.hpp"

#include <cmath>

namespace semiflow {

MapSpec map_preset(const std::string& name) {
    MapSpec spec;
    spec.name = name;
    spec.alpha = 0.5;
    if (name == "doub2" || name == "nonlin") {
        spec.intervals = {{0.0, 0.5}, {0.5, 1.0}};
        spec.branches = {
            {0, 0, BranchFamily::Affine, 0.5, 0.0, 0.0},
            {0, 1, BranchFamily::Affine, 0.5, 0.0, 0.0},
            {1, 0, BranchFamily::Affine, 0.5, 0.5, 0.0},
            {1, 1, BranchFamily::Affine, 0.5, 0.5, 0.0},
        };
        if (name == "nonlin") {
            spec.branches[0].family = BranchFamily::Perturbed;
            spec.branches[0].eps = 0.05;
        }
        return spec;
    }
    if (name == "tri3") {
        spec.intervals = {{0.0, 1.0 / 3.0}, {1.0 / 3.0, 2.0 / 3.0},
                          {2.0 / 3.0, 1.0}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                spec.branches.push_back(
                    {i, j, BranchFamily::Affine, 1.0 / 3.0, i / 3.0, 0.0});
        return spec;
    }
    if (name == "gm2") {
        // Non-full fixture: A = [[1, 1], [1, 0]], mixing at n = 2.
        spec.intervals = {{0.0, 2.0 / 3.0}, {2.0 / 3.0, 1.0}};
        spec.branches = {
            {0, 0, BranchFamily::Affine, 0.7, 0.0, 0.0},
            {0, 1, BranchFamily::Affine, 0.6, 1.0 / 15.0, 0.0},
            {1, 0, BranchFamily::Affine, 0.5, 2.0 / 3.0, 0.0},
        };
        return spec;
    }
    throw ConfigError("unknown map preset '" + name + "'");
}

RoofFunction roof_preset(const std::string& name) {
    if (name == "constant")
        return RoofFunction([](double) { return 1.0; }, 0.0, 1.0, name);
    if (name == "linear")
        return RoofFunction([](double x) { return 1.0 + 0.5 * x; }, 0.5, 1.0,
                            name);
    if (name == "quadratic")
        return RoofFunction([](double x) { return 1.0 + 0.25 * x * x; }, 0.5,
                            1.0, name);
    if (name == "kink")
        return RoofFunction(
            [](double x) { return 1.0 + std::abs(x - 1.0 / 3.0) / 3.0; },
            1.0 / 3.0, 1.0, name);
    throw ConfigError("unknown roof preset '" + name + "'");
}

std::vector<std::string> map_preset_names() {
    return {"doub2", "tri3", "nonlin", "gm2"};
}

std::vector<std::string> roof_preset_names() {
    return {"constant", "linear", "quadratic", "kink"};
}

SuspensionObservable observable_preset(const std::string& name,
                                       const MarkovMap& map,
                                       const RoofFunction& roof) {
    SuspensionObservable E;
    E.name = name;
    const double diam = map.hull_hi() - map.hull_lo();
    const double alpha = map.alpha();
    const double rsup = roof_sup(map, roof);
    const double rinf = roof.infimum();

    if (name == "one") {
        E.eval = [](double, double) { return Complex(1.0, 0.0); };
        E.sup = 1.0;
        return E;
    }
    if (name == "x") {
        E.eval = [](double x, double) { return Complex(x, 0.0); };
        E.sup = std::max(std::abs(map.hull_lo()), std::abs(map.hull_hi()));
        E.alpha_semi = std::pow(diam, 1.0 - alpha);
        return E;
    }
    if (name == "u") {
        E.eval = [](double, double u) { return Complex(u, 0.0); };
        E.sup = rsup;
        E.du_sup = 1.0;
        return E;
    }
    if (name == "sinx") {
        E.eval = [](double x, double) {
            return Complex(std::sin(2.0 * M_PI * x), 0.0);
        };
        E.sup = 1.0;
        E.alpha_semi = 2.0 * M_PI * std::pow(diam, 1.0 - alpha);
        return E;
    }
    if (name == "usin") {
        // sin(2 pi u / r(x)): vanishes at u = 0 and u = r(x), so it is
        // continuous across the roof identification.
        auto r = roof;
        E.eval = [r](double x, double u) {
            return Complex(std::sin(2.0 * M_PI * u / r(x)), 0.0);
        };
        E.sup = 1.0;
        E.du_sup = 2.0 * M_PI / rinf;
        const double lip =
            2.0 * M_PI * rsup * roof.lipschitz() / (rinf * rinf);
        E.alpha_semi = lip * std::pow(diam, 1.0 - alpha);
        return E;
    }
    if (name == "expu" || name == "expu_conj") {
        const double sign = (name == "expu") ? 1.0 : -1.0;
        E.eval = [sign](double, double u) {
            return std::exp(Complex(0.0, sign * 2.0 * M_PI * u));
        };
        E.sup = 1.0;
        E.du_sup = 2.0 * M_PI;
        return E;
    }
    if (name == "expu_r" || name == "expu_r_conj") {
        // Complex unit-modulus member of the sin(2 pi u / r(x)) family;
        // pairing it with its conjugate gives a correlation whose modulus
        // decays without passing through phase zeros.
        const double sign = (name == "expu_r") ? 1.0 : -1.0;
        auto r = roof;
        E.eval = [r, sign](double x, double u) {
            return std::exp(Complex(0.0, sign * 2.0 * M_PI * u / r(x)));
        };
        E.sup = 1.0;
        E.du_sup = 2.0 * M_PI / rinf;
        const double lip =
            2.0 * M_PI * rsup * roof.lipschitz() / (rinf * rinf);
        E.alpha_semi = lip * std::pow(diam, 1.0 - alpha);
        return E;
    }
    if (name == "usin_sinx") {
        auto r = roof;
        E.eval = [r](double x, double u) {
            return Complex(std::sin(2.0 * M_PI * u / r(x)) *
                               std::sin(2.0 * M_PI * x),
                           0.0);
        };
        E.sup = 1.0;
        E.du_sup = 2.0 * M_PI / rinf;
        const double lip =
            2.0 * M_PI * rsup * roof.lipschitz() / (rinf * rinf) +
            2.0 * M_PI;
        E.alpha_semi = lip * std::pow(diam, 1.0 - alpha);
        return E;
    }
    throw ConfigError("unknown observable preset '" + name + "'");
}

std::vector<std::string> observable_preset_names() {
    return {"one", "x",  "u",         "sinx",  "usin",
            "expu", "expu_conj", "expu_r", "expu_r_conj", "usin_sinx"};
}

} // namespace semiflow
