#pragma once
// Working charts and metric fields. Disk chart: xi = z, t = ln|z|.
// Cusp chart: xi = ln z, t = Re xi; tau has coefficient 1 against d xi in both.
#include <array>
#include <memory>
#include <vector>

#include "higgslab/bundle.hpp"

namespace higgslab {

enum class ChartKind { disk, cusp };

struct Chart {
  ChartKind kind = ChartKind::disk;
  double t_of(cplx xi) const;
  cplx dt_dxi(cplx xi) const;            // complex derivative d t / d xi
  double rho(double t) const;            // Laplacian factor: Delta_xi f = f_tt / (4 rho)
  double hyp_factor(double t) const;     // g_hyp = lambda |d xi|^2
  double hyp_factor_at(cplx xi) const;
  cplx coefficient(const bundle::PowerCoefficient& pc, cplx xi) const;
  double abs2(const bundle::PowerCoefficient& pc, double t) const;
  // Hyperbolic distance and unit-speed geodesics in chart coordinates.
  double distance(cplx a, cplx b) const;
  cplx geodesic_point(cplx p, double phi, double s) const;
  // Euclidean size of one mesh cell of width h (in t) at xi.
  double cell_size(cplx xi, double h) const;
};

// Log-metric sample: x = ln H_-2, y = ln H_-1 and their d/d xi derivatives.
struct FieldSample {
  double x = 0.0, y = 0.0;
  cplx dx{0.0, 0.0}, dy{0.0, 0.0};
};

class MetricField {
 public:
  explicit MetricField(Chart chart) : chart_(chart) {}
  virtual ~MetricField() = default;
  virtual FieldSample eval(cplx xi) const = 0;
  virtual bool contains(cplx xi) const = 0;
  // Smallest mesh spacing in t near xi (for tolerance bookkeeping).
  virtual double t_spacing() const = 0;
  const Chart& chart() const { return chart_; }

 private:
  Chart chart_;
};

// Quintic Hermite interpolation in t of nodal (value, first, second derivative).
class HermiteField : public MetricField {
 public:
  HermiteField(Chart chart, std::vector<double> t, std::vector<double> x,
               std::vector<double> xt, std::vector<double> xtt, std::vector<double> y,
               std::vector<double> yt, std::vector<double> ytt);
  FieldSample eval(cplx xi) const override;
  bool contains(cplx xi) const override;
  double t_spacing() const override { return h_; }
  // Interpolated (x, x_t, x_tt, y, y_t, y_tt) at t.
  std::array<double, 6> eval_t(double t) const;

 private:
  std::vector<double> t_, x_, xt_, xtt_, y_, yt_, ytt_;
  double h_ = 0.0;
};

// Exact solution on the whole disk for gamma = 0 and constant beta.
class FuchsianField : public MetricField {
 public:
  explicit FuchsianField(double beta_abs2);
  FieldSample eval(cplx xi) const override;
  bool contains(cplx xi) const override { return std::abs(xi) < 1.0; }
  double t_spacing() const override { return 0.0; }
  static double amplitude(double beta_abs2) { return 2.0 * beta_abs2 / 3.0; }

 private:
  double log_amp_;
};

// Analytic base plus an interpolated correction in log variables.
class SumField : public MetricField {
 public:
  SumField(std::shared_ptr<const MetricField> base, std::unique_ptr<HermiteField> correction);
  FieldSample eval(cplx xi) const override;
  bool contains(cplx xi) const override { return corr_->contains(xi) && base_->contains(xi); }
  double t_spacing() const override { return corr_->t_spacing(); }

 private:
  std::shared_ptr<const MetricField> base_;
  std::unique_ptr<HermiteField> corr_;
};

}  // namespace higgslab
