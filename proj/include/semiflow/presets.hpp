#pragma once

// Built-in catalogue of canonical systems used throughout the test and
// experiment pipelines: the doubling map, the slope-3 ternary map, the
// perturbed doubling map, and a non-full golden-mean-type map, together
// with the constant / linear / quadratic / kink roof family and the
// named suspension observables.

#include <string>
#include <vector>

#include "semiflow/markov_map.hpp"
#include "semiflow/suspension_flow.hpp"

namespace semiflow {

/// Map presets: "doub2", "tri3", "nonlin", "gm2".
MapSpec map_preset(const std::string& name);

/// Roof presets: "constant" (r = 1), "linear" (1 + x/2),
/// "quadratic" (1 + x^2/4), "kink" (1 + |x - 1/3|/3).
RoofFunction roof_preset(const std::string& name);

std::vector<std::string> map_preset_names();
std::vector<std::string> roof_preset_names();

/// Observable catalogue on the suspension over (map, roof):
/// "one", "x", "u", "sinx", "usin" (sin(2 pi u / r(x))),
/// "expu" (e^{2 pi i u}), "expu_conj", "usin_sinx" (product).
SuspensionObservable observable_preset(const std::string& name,
                                       const MarkovMap& map,
                                       const RoofFunction& roof);

std::vector<std::string> observable_preset_names();

} // namespace semiflow
