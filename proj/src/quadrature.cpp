#include "soilml/quadrature.hpp"

namespace soilml::quad {

double integrate_uniform(const std::vector<double>& y, double h) {
  Eigen::Map<const Eigen::VectorXd> v(y.data(),
                                      static_cast<Eigen::Index>(y.size()));
  return integrate_uniform(v, h);
}

double average(const std::vector<double>& y, double h) {
  Eigen::Map<const Eigen::VectorXd> v(y.data(),
                                      static_cast<Eigen::Index>(y.size()));
  return average(v, h);
}

}  // namespace soilml::quad
