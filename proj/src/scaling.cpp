#include "scvx/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace scvx {

namespace {

const char* block_name(int start) {
  switch (start) {
    case sidx::p:
      return "position";
    case sidx::v:
      return "velocity";
    case sidx::w:
      return "angular rate";
    default:
      return "state";
  }
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ScalingTransform fit_scaling(const std::vector<ChaserState>& guess, const VehicleModel& model,
                             int n_intervals) {
  if (guess.empty()) {
    throw std::invalid_argument("fit_scaling: empty guess");
  }
  ScalingTransform s;
  const auto count = static_cast<double>(guess.size());

  Vec13 mean = Vec13::Zero();
  Vec13 absmax = Vec13::Zero();
  for (const auto& st : guess) {
    const Vec13 x = st.to_vector();
    mean += x;
    absmax = absmax.cwiseMax(x.cwiseAbs());
  }
  mean /= count;

  Vec13 dev = Vec13::Zero();
  for (const auto& st : guess) {
    dev = dev.cwiseMax((st.to_vector() - mean).cwiseAbs());
  }
  // Round-off in the mean of a constant component is not a deviation.
  for (int i = 0; i < kStateDim; ++i) {
    if (dev[i] <= 1e-12 * std::max(1.0, std::abs(mean[i]))) dev[i] = 0.0;
  }

  for (int start : {sidx::p, sidx::v, sidx::w}) {
    const double block_dev = dev.segment<3>(start).maxCoeff();
    const double block_mean = mean.segment<3>(start).cwiseAbs().maxCoeff();
    for (int a = 0; a < 3; ++a) {
      const int i = start + a;
      s.sx[i] = mean[i];
      double d = dev[i];
      if (!(d > 0.0)) {
        d = block_dev > 0.0 ? block_dev : (block_mean > 0.0 ? block_mean : 1.0);
        s.warnings.push_back(std::string("degenerate guess on ") + block_name(start) + " axis " +
                             std::to_string(a) + "; scale set to " + fmt_short(d));
      }
      s.Sx[i] = std::max(d, kScaleFloor);
    }
  }

  const double absmax_all = absmax.maxCoeff();
  for (int i = 0; i < kStateDim; ++i) {
    double d = absmax[i];
    if (!(d > 0.0)) {
      const int start = i < sidx::v ? sidx::p : i < sidx::q ? sidx::v : i < sidx::w ? sidx::q : sidx::w;
      const int len = start == sidx::q ? 4 : 3;
      const double block = absmax.segment(start, len).maxCoeff();
      d = block > 0.0 ? block : (absmax_all > 0.0 ? absmax_all : 1.0);
    }
    s.Sl[i] = std::max(d, kScaleFloor);
  }

  const auto m = static_cast<Eigen::Index>(model.thruster_count());
  s.Su = Eigen::VectorXd::Constant(m, 0.5 * model.dt_max());
  s.su = Eigen::VectorXd::Constant(m, 0.5 * model.dt_max());
  s.SJ = n_intervals * static_cast<double>(m) * model.dt_min() / 4.0;
  return s;
}

}  // namespace scvx
