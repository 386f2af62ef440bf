#include "twolevel/params.hpp"

#include <cmath>
#include <vector>

#include "twolevel/errors.hpp"

namespace twolevel {

ModelParams validate(const ModelParams& params) {
    std::vector<std::string> faults;
    auto fault = [&faults](const std::string& msg) { faults.push_back(msg); };

    if (!(params.E_a > params.E_b)) fault("degenerate levels: E_a <= E_b");
    if (params.gamma < 0) fault("negative gamma");
    if (params.E0 < 0) fault("negative E0");
    if (!(params.T > 0)) fault("non-positive period T");
    if (!(params.omega_c > 0)) fault("non-positive cutoff omega_c");
    if (params.E_a > params.E_b) {
        const double w0 = params.omega0();
        if (std::abs(params.omega_c - w0) <= 1e-12 * std::max(1.0, std::abs(w0)))
            fault("omega_c = omega0: Omega_+ singular");
    }
    for (double v : {params.E_a, params.E_b, params.nu, params.gamma, params.omega_c,
                     params.dipole, params.E0, params.T})
        if (!std::isfinite(v)) {
            fault("non-finite parameter");
            break;
        }

    if (!faults.empty()) {
        std::string msg = "invalid parameters: ";
        for (std::size_t i = 0; i < faults.size(); ++i) {
            if (i) msg += "; ";
            msg += faults[i];
        }
        throw ValidationError(msg);
    }
    return params;
}

NHParams nh_from_master(const ModelParams& params) {
    NHParams nh;
    nh.gamma_a = 2.0 * params.gamma;
    nh.gamma_b = 0.0;
    nh.V0 = params.rabi();
    nh.Delta = params.detuning();
    return nh;
}

double omega_plus(const ModelParams& params) {
    const double ratio = params.omega_c / params.omega0();
    const double arg = std::abs(ratio - 1.0) * (ratio + 1.0);
    if (arg == 0.0) throw ValidationError("omega_plus: omega_c = omega0, log singular");
    return -(params.gamma / M_PI) * std::log(arg);
}

} // namespace twolevel
