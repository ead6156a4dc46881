#include "divcol/dofmap.hpp"

#include "divcol/errors.hpp"

namespace divcol {

void unpack_solution(const DofMap& dm, const Eigen::VectorXd& x,
                     std::vector<std::vector<double>*> fields, double& lambda) {
    if (fields.size() != dm.fields.size())
        throw InvalidInput("unpack_solution: field count mismatch");
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const auto& fd = dm.fields[f];
        auto& coeffs = *fields[f];
        coeffs.resize(fd.global.size());
        for (std::size_t i = 0; i < fd.global.size(); ++i)
            coeffs[i] = fd.global[i] >= 0 ? x[fd.global[i]] : fd.fixed[i];
    }
    lambda = dm.gauge == GaugeMode::ZeroMean ? x[dm.num_free] : 0.0;
}

Eigen::VectorXd pack_solution(const DofMap& dm,
                              std::vector<const std::vector<double>*> fields, double lambda) {
    if (fields.size() != dm.fields.size())
        throw InvalidInput("pack_solution: field count mismatch");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dm.num_unknowns());
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const auto& fd = dm.fields[f];
        const auto& coeffs = *fields[f];
        if (coeffs.size() != fd.global.size())
            throw InvalidInput("pack_solution: coefficient length mismatch");
        for (std::size_t i = 0; i < fd.global.size(); ++i)
            if (fd.global[i] >= 0)
                x[fd.global[i]] = coeffs[i];
    }
    if (dm.gauge == GaugeMode::ZeroMean)
        x[dm.num_free] = lambda;
    return x;
}

} // namespace divcol
