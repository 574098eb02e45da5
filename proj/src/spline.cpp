#include <algorithm>
#include <cmath>

#include "higgslab/errors.hpp"
#include "higgslab/field.hpp"
#include "higgslab/hypgeom.hpp"

namespace higgslab {

double Chart::t_of(cplx xi) const {
  return kind == ChartKind::disk ? std::log(std::abs(xi)) : xi.real();
}

cplx Chart::dt_dxi(cplx xi) const {
  return kind == ChartKind::disk ? 1.0 / (2.0 * xi) : cplx(0.5, 0.0);
}

double Chart::rho(double t) const { return kind == ChartKind::disk ? std::exp(2.0 * t) : 1.0; }

double Chart::hyp_factor(double t) const {
  if (kind == ChartKind::disk) {
    double s = -std::expm1(2.0 * t);
    return 4.0 / (s * s);
  }
  return 1.0 / (t * t);
}

double Chart::hyp_factor_at(cplx xi) const {
  if (kind == ChartKind::disk) {
    double s = 1.0 - std::norm(xi);
    return 4.0 / (s * s);
  }
  return hyp_factor(xi.real());
}

cplx Chart::coefficient(const bundle::PowerCoefficient& pc, cplx xi) const {
  if (pc.is_zero()) return 0.0;
  if (kind == ChartKind::disk) return pc.coeff * std::pow(xi, pc.power);
  return pc.coeff * std::exp(static_cast<double>(pc.power) * xi);
}

double Chart::abs2(const bundle::PowerCoefficient& pc, double t) const {
  if (pc.is_zero()) return 0.0;
  return std::norm(pc.coeff) * std::exp(2.0 * pc.power * t);
}

double Chart::distance(cplx a, cplx b) const {
  if (kind == ChartKind::disk) return hypgeom::hyp_distance(a, b);
  // w = -i xi lies in the upper half-plane.
  const cplx wa = cplx(0.0, -1.0) * a, wb = cplx(0.0, -1.0) * b;
  const double arg = 1.0 + std::norm(wa - wb) / (2.0 * wa.imag() * wb.imag());
  return std::acosh(std::max(arg, 1.0));
}

cplx Chart::geodesic_point(cplx p, double phi, double s) const {
  if (kind == ChartKind::disk) return hypgeom::disk_geodesic_point(p, phi, s);
  const cplx pw = cplx(0.0, -1.0) * p;
  const cplx d = std::tanh(0.5 * s) * std::polar(1.0, phi);
  const cplx w = (pw - std::conj(pw) * d) / (1.0 - d);
  return cplx(0.0, 1.0) * w;
}

double Chart::cell_size(cplx xi, double h) const {
  return kind == ChartKind::disk ? std::abs(xi) * std::expm1(h) : h;
}

namespace {

struct Basis {
  double h[6];
  double d[6];
  double dd[6];
};

Basis quintic_basis(double s) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  Basis b{};
  b.h[0] = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  b.h[1] = s - 6 * s3 + 8 * s4 - 3 * s5;
  b.h[2] = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  b.h[3] = 10 * s3 - 15 * s4 + 6 * s5;
  b.h[4] = -4 * s3 + 7 * s4 - 3 * s5;
  b.h[5] = 0.5 * (s3 - 2 * s4 + s5);
  b.d[0] = -30 * s2 + 60 * s3 - 30 * s4;
  b.d[1] = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  b.d[2] = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  b.d[3] = 30 * s2 - 60 * s3 + 30 * s4;
  b.d[4] = -12 * s2 + 28 * s3 - 15 * s4;
  b.d[5] = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
  b.dd[0] = -60 * s + 180 * s2 - 120 * s3;
  b.dd[1] = -36 * s + 96 * s2 - 60 * s3;
  b.dd[2] = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
  b.dd[3] = 60 * s - 180 * s2 + 120 * s3;
  b.dd[4] = -24 * s + 84 * s2 - 60 * s3;
  b.dd[5] = 0.5 * (6 * s - 24 * s2 + 20 * s3);
  return b;
}

}  // namespace

HermiteField::HermiteField(Chart chart, std::vector<double> t, std::vector<double> x,
                           std::vector<double> xt, std::vector<double> xtt,
                           std::vector<double> y, std::vector<double> yt,
                           std::vector<double> ytt)
    : MetricField(chart), t_(std::move(t)), x_(std::move(x)), xt_(std::move(xt)),
      xtt_(std::move(xtt)), y_(std::move(y)), yt_(std::move(yt)), ytt_(std::move(ytt)) {
  if (t_.size() < 2) throw InvalidInput("HermiteField: need at least two nodes");
  h_ = (t_.back() - t_.front()) / static_cast<double>(t_.size() - 1);
}

bool HermiteField::contains(cplx xi) const {
  if (chart().kind == ChartKind::disk && xi == cplx(0.0)) return false;
  const double t = chart().t_of(xi);
  return t >= t_.front() && t <= t_.back();
}

std::array<double, 6> HermiteField::eval_t(double t) const {
  const double n1 = static_cast<double>(t_.size() - 1);
  double pos = (t - t_.front()) / h_;
  if (pos < -1e-9 || pos > n1 + 1e-9) throw InvalidInput("HermiteField: point outside the mesh");
  long i = std::clamp(static_cast<long>(std::floor(pos)), 0L, static_cast<long>(t_.size()) - 2);
  const double s = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
  const Basis b = quintic_basis(s);
  const double h = h_, h2 = h_ * h_;
  auto interp = [&](const std::vector<double>& f, const std::vector<double>& ft,
                    const std::vector<double>& ftt, const double* w, double scale) {
    return scale * (w[0] * f[i] + h * w[1] * ft[i] + h2 * w[2] * ftt[i] + w[3] * f[i + 1] +
                    h * w[4] * ft[i + 1] + h2 * w[5] * ftt[i + 1]);
  };
  return {interp(x_, xt_, xtt_, b.h, 1.0),       interp(x_, xt_, xtt_, b.d, 1.0 / h),
          interp(x_, xt_, xtt_, b.dd, 1.0 / h2), interp(y_, yt_, ytt_, b.h, 1.0),
          interp(y_, yt_, ytt_, b.d, 1.0 / h),   interp(y_, yt_, ytt_, b.dd, 1.0 / h2)};
}

FieldSample HermiteField::eval(cplx xi) const {
  if (!contains(xi)) throw InvalidInput("HermiteField: point outside the solved region");
  const auto v = eval_t(chart().t_of(xi));
  const cplx dt = chart().dt_dxi(xi);
  return FieldSample{v[0], v[3], v[1] * dt, v[4] * dt};
}

FuchsianField::FuchsianField(double beta_abs2)
    : MetricField(Chart{ChartKind::disk}), log_amp_(std::log(amplitude(beta_abs2))) {
  if (!(beta_abs2 > 0.0)) throw InvalidInput("FuchsianField: beta must be nonzero");
}

FieldSample FuchsianField::eval(cplx xi) const {
  const double s = 1.0 - std::norm(xi);
  if (!(s > 0.0)) throw InvalidInput("FuchsianField: point outside the disk");
  const double loglam = std::log(4.0) - 2.0 * std::log(s);
  const cplx dloglam = 2.0 * std::conj(xi) / s;
  return FieldSample{log_amp_ - 2.0 * loglam, log_amp_ - loglam, -2.0 * dloglam, -dloglam};
}

SumField::SumField(std::shared_ptr<const MetricField> base, std::unique_ptr<HermiteField> correction)
    : MetricField(correction->chart()), base_(std::move(base)), corr_(std::move(correction)) {
  if (base_->chart().kind != chart().kind) throw InvalidInput("SumField: chart mismatch");
}

FieldSample SumField::eval(cplx xi) const {
  if (!contains(xi)) throw InvalidInput("SumField: point outside the solved region");
  const FieldSample a = base_->eval(xi), b = corr_->eval(xi);
  return FieldSample{a.x + b.x, a.y + b.y, a.dx + b.dx, a.dy + b.dy};
}

}  // namespace higgslab
