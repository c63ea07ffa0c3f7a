#include "relgen/maxwellian.hpp"

#include <sstream>

namespace relgen {

Eigen::ArrayXd momentum_boltzmann_factor(const PhaseGrid& grid, const ModelParams& params) {
  Eigen::ArrayXd kinetic(grid.np());
  for (int j = 0; j < grid.np(); ++j) kinetic(j) = kinetic_energy(grid.p(j), params);
  return (-(kinetic - kinetic.minCoeff()) / params.theta).exp();
}

Eigen::ArrayXd position_boltzmann_factor(const PhaseGrid& grid, const ModelParams& params,
                                         const Potential& potential) {
  Eigen::ArrayXd v(grid.nq());
  for (int i = 0; i < grid.nq(); ++i) v(i) = potential.value(grid.q(i));
  return (-(v - v.minCoeff()) / params.theta).exp();
}

double momentum_tail_ratio(double pmax, const ModelParams& params) {
  return std::exp(-kinetic_energy(pmax, params) / params.theta);
}

MaxwellianResult maxwellian(const PhaseGrid& grid, const ModelParams& params, const Potential& potential) {
  params.validate();
  const double tail = momentum_tail_ratio(grid.pmax(), params);
  if (!(tail < kMaxwellianTailTolerance)) {
    std::ostringstream msg;
    msg << "momentum window Pmax=" << grid.pmax() << " under-resolves the Maxwellian tail (relative value "
        << tail << " >= " << kMaxwellianTailTolerance << ")";
    throw PreconditionError(msg.str());
  }
  const Eigen::ArrayXd fq = position_boltzmann_factor(grid, params, potential);
  const Eigen::ArrayXd fp = momentum_boltzmann_factor(grid, params);
  GridField unnormalised = fq.matrix() * fp.matrix().transpose();
  const double z = grid.integrate(unnormalised);

  double vmin = potential.value(grid.q(0));
  for (int i = 1; i < grid.nq(); ++i) vmin = std::min(vmin, potential.value(grid.q(i)));
  double tmin = kinetic_energy(grid.p(0), params);
  for (int j = 1; j < grid.np(); ++j) tmin = std::min(tmin, kinetic_energy(grid.p(j), params));
  const double hmin = rest_energy(params) + tmin + vmin;

  return {unnormalised / z, std::log(z) - hmin / params.theta};
}

}  // namespace relgen
