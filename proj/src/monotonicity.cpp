#include "fpsolve/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fpsolve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int mirror_index(int n, int t) { return ghost_map(n, t).index; }

struct WorstTracker {
  double margin = kInf;
  int where = -1;
  void update(double m, int p) {
    if (m < margin) {
      margin = m;
      where = p;
    }
  }
};

ConditionRecord make_record(std::string id, std::string detail, const WorstTracker& w,
                            bool strict) {
  ConditionRecord r;
  r.id = std::move(id);
  r.detail = std::move(detail);
  r.margin = w.margin;
  r.strict = strict;
  r.pass = strict ? (w.margin > 0.0) : (w.margin >= 0.0);
  r.worst_point = w.where;
  return r;
}

// ---- closed-form sufficient conditions ------------------------------------

void conditions_order2_1d(const Grid& g, const SampledFields& f, double D, double dt,
                          std::vector<ConditionRecord>& out) {
  const int n = g.n;
  const double h = g.h;
  WorstTracker adv, rowsum;
  detail::AxisView vx{&g, &f.M, &f.u, 0, 0};
  for (int i = 0; i < n; ++i) {
    const double minM = std::min({vx.m(i - 1), vx.m(i), vx.m(i + 1)});
    adv.update(D * minM - h * std::abs(f.u[i]), i);
    rowsum.update(f.M[i] + dt * (vx.u(i - 1) - vx.u(i + 1)) / (2.0 * h), i);
  }
  out.push_back(make_record("advection-measure-bound",
                            "h*|u_i| <= D*min(M) over the neighbor patch", adv, false));
  out.push_back(make_record("row-sum-positivity",
                            "M_i + dt*(u_{i-1}-u_{i+1})/(2h) > 0", rowsum, true));
}

void conditions_order2_2d(const Grid& g, const SampledFields& f, double D, double dt,
                          std::vector<ConditionRecord>& out) {
  const int n = g.n;
  const double h = g.h;
  WorstTracker adv, rowsum;
  auto M = [&](int i, int j) { return f.M[g.index(mirror_index(n, i), mirror_index(n, j))]; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = g.index(i, j);
      const double minM =
          std::min({M(i - 1, j), M(i + 1, j), M(i, j), M(i, j - 1), M(i, j + 1)});
      const double umax = std::max(std::abs(f.u[p]), std::abs(f.v[p]));
      adv.update(D * minM - h * umax, p);
      detail::AxisView vx{&g, &f.M, &f.u, 0, j};
      detail::AxisView vy{&g, &f.M, &f.v, 1, i};
      const double divterm =
          (vx.u(i - 1) - vx.u(i + 1)) / (2.0 * h) + (vy.u(j - 1) - vy.u(j + 1)) / (2.0 * h);
      rowsum.update(f.M[p] + dt * divterm, p);
    }
  }
  out.push_back(make_record("advection-measure-bound",
                            "h*max(|u|,|v|) <= D*min(M) over the 5-point patch", adv, false));
  out.push_back(make_record("row-sum-positivity",
                            "M + dt*(centered velocity divergence) > 0", rowsum, true));
}

void conditions_order4_1d(const Grid& g, const SampledFields& f, double D, double dt,
                          std::vector<ConditionRecord>& out, DerivativeSource& dsrc) {
  const int n = g.n;
  const double h = g.h;
  const bool analytic = f.M_dx.has_value();
  dsrc = analytic ? DerivativeSource::Analytic : DerivativeSource::Surrogate;
  WorstTracker adv, var, rowsum, tstep;
  for (int c = 0; c + 2 < n; c += 2) {  // one element per two spacings
    const double minM = std::min({f.M[c], f.M[c + 1], f.M[c + 2]});
    const double maxU =
        std::max({std::abs(f.u[c]), std::abs(f.u[c + 1]), std::abs(f.u[c + 2])});
    adv.update(0.25 * D * minM - h * maxU, c);
    double dm;
    if (analytic) {
      const Vector& mx = *f.M_dx;
      dm = std::max({std::abs(mx[c]), std::abs(mx[c + 1]), std::abs(mx[c + 2])});
    } else {
      dm = std::max(std::abs(f.M[c + 1] - f.M[c]), std::abs(f.M[c + 2] - f.M[c + 1])) / h;
    }
    var.update(0.075 * minM - h * dm, c);
  }
  detail::AxisView vx{&g, &f.M, &f.u, 0, 0};
  for (int i = 0; i < n; ++i) {
    double advdiv;
    if (i % 2 == 0)
      advdiv = (-vx.u(i - 2) + 4.0 * vx.u(i - 1) - 4.0 * vx.u(i + 1) + vx.u(i + 2)) / (4.0 * h);
    else
      advdiv = (vx.u(i - 1) - vx.u(i + 1)) / (2.0 * h);
    rowsum.update(f.M[i] + dt * advdiv, i);
  }
  tstep.update(D > 0.0 ? dt - 50.0 * h * h / D : -kInf, 0);
  out.push_back(make_record("advection-bound",
                            "h*max|u| <= D/4 * min(M) on each element", adv, false));
  out.push_back(make_record("measure-variation-bound",
                            "h*max|M'| <= 0.075 * min(M) on each element", var, false));
  out.push_back(make_record("row-sum-positivity",
                            "M_i + dt*(discrete velocity divergence) > 0", rowsum, true));
  out.push_back(
      make_record("timestep-lower-bound", "dt >= 50*h^2/D", tstep, false));
}

void conditions_order4_2d(const Grid& g, const SampledFields& f, double D, double dt,
                          std::vector<ConditionRecord>& out, DerivativeSource& dsrc) {
  const int n = g.n;
  const double h = g.h;
  const bool analytic = f.M_dx.has_value() && f.M_dy.has_value();
  dsrc = analytic ? DerivativeSource::Analytic : DerivativeSource::Surrogate;
  WorstTracker adv, var, rowsum, tstep;
  auto M = [&](int i, int j) { return f.M[g.index(mirror_index(n, i), mirror_index(n, j))]; };
  auto vel2 = [&](int i, int j) {
    const int p = g.index(mirror_index(n, i), mirror_index(n, j));
    return std::hypot(f.u[p], f.v[p]);
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i % 2 == 1 && j % 2 == 1) continue;  // no wide couplings at cell centers
      const int p = g.index(i, j);
      double minM = kInf, maxU = 0.0, maxG = 0.0;
      for (int b = j - 2; b <= j + 2; ++b) {
        for (int a = i - 2; a <= i + 2; ++a) {
          minM = std::min(minM, M(a, b));
          maxU = std::max(maxU, vel2(a, b));
          if (analytic) {
            const int q = g.index(mirror_index(n, a), mirror_index(n, b));
            maxG = std::max(maxG, std::hypot((*f.M_dx)[q], (*f.M_dy)[q]));
          }
        }
      }
      if (!analytic) {
        for (int b = j - 2; b <= j + 2; ++b)
          for (int a = i - 2; a <= i + 1; ++a)
            maxG = std::max(maxG, std::abs(M(a + 1, b) - M(a, b)) / h);
        for (int b = j - 2; b <= j + 1; ++b)
          for (int a = i - 2; a <= i + 2; ++a)
            maxG = std::max(maxG, std::abs(M(a, b + 1) - M(a, b)) / h);
      }
      adv.update(D / 20.0 * minM - h * maxU, p);
      var.update(std::sqrt(2.0) / 320.0 * minM - h * maxG, p);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i % 2 == 1 && j % 2 == 1) continue;
      const int p = g.index(i, j);
      detail::AxisView vx{&g, &f.M, &f.u, 0, j};
      detail::AxisView vy{&g, &f.M, &f.v, 1, i};
      const double wide_x =
          (-vx.u(i - 2) + 4.0 * vx.u(i - 1) - 4.0 * vx.u(i + 1) + vx.u(i + 2)) / (4.0 * h);
      const double wide_y =
          (-vy.u(j - 2) + 4.0 * vy.u(j - 1) - 4.0 * vy.u(j + 1) + vy.u(j + 2)) / (4.0 * h);
      double val;
      if (i % 2 == 0 && j % 2 == 0) {
        val = f.M[p] + dt * (wide_x + wide_y);
      } else if (i % 2 == 0) {  // midline along y
        val = f.M[p] + dt * D * (M(i, j - 1) + M(i, j + 1)) / (h * h) + dt * wide_x;
      } else {  // midline along x
        val = f.M[p] + dt * D * (M(i - 1, j) + M(i + 1, j)) / (h * h) + dt * wide_y;
      }
      rowsum.update(val, p);
    }
  }
  tstep.update(D > 0.0 ? dt - h * h / (std::sqrt(2.0) * D) : -kInf, 0);
  out.push_back(make_record("advection-bound",
                            "h*max|(u,v)| <= D/20 * min(M) on each 5x5 patch", adv, false));
  out.push_back(make_record("measure-variation-bound",
                            "h*max|grad M| <= sqrt(2)/320 * min(M) on each 5x5 patch", var,
                            false));
  out.push_back(make_record("row-sum-positivity",
                            "measure plus discrete divergence terms > 0 per row class", rowsum,
                            true));
  out.push_back(
      make_record("timestep-lower-bound", "dt >= h^2/(sqrt(2)*D)", tstep, false));
}

}  // namespace

bool MonotonicityReport::conditions_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionRecord& r) { return r.pass; });
}

bool MonotonicityReport::certificate_pass() const {
  return !certificate.empty() &&
         std::all_of(certificate.begin(), certificate.end(),
                     [](const ConditionRecord& r) { return r.pass; });
}

MonotonicityReport check_sufficient_conditions(const Grid& grid, const SampledFields& fields,
                                               double diffusion, double dt) {
  if (fields.points() != grid.points())
    throw ConfigError("check_sufficient_conditions: fields not sampled on this grid");
  MonotonicityReport rep;
  rep.derivative_source = DerivativeSource::None;
  if (grid.order == SchemeOrder::Second) {
    if (grid.dimension == 1)
      conditions_order2_1d(grid, fields, diffusion, dt, rep.conditions);
    else
      conditions_order2_2d(grid, fields, diffusion, dt, rep.conditions);
  } else {
    if (grid.dimension == 1)
      conditions_order4_1d(grid, fields, diffusion, dt, rep.conditions, rep.derivative_source);
    else
      conditions_order4_2d(grid, fields, diffusion, dt, rep.conditions, rep.derivative_source);
  }
  rep.verdict = rep.conditions_pass() ? Verdict::CertifiedMonotone : Verdict::ConditionsFail;
  return rep;
}

// ---- Lorenz splitting ------------------------------------------------------

namespace {

struct PartRow {
  struct Slot {
    int col;
    double ap, az, as;
  };
  Slot s[24];
  int count = 0;
  void reset() { count = 0; }
  Slot& at(int col) {
    for (int k = 0; k < count; ++k)
      if (s[k].col == col) return s[k];
    s[count] = {col, 0.0, 0.0, 0.0};
    return s[count++];
  }
};

}  // namespace

LorenzSplitting lorenz_split(const SchemeOperator& op, const SampledFields& fields) {
  if (op.order != SchemeOrder::Fourth)
    throw ConfigError("lorenz_split: defined for the fourth-order schemes only");
  const Grid& g = op.grid;
  const int np = g.points();
  if (fields.points() != np) throw ConfigError("lorenz_split: fields/grid mismatch");

  LorenzSplitting out;
  out.A_d.resize(np);
  // Diagonal part taken from the assembled matrix itself.
  for (int p = 0; p < np; ++p) out.A_d[p] = op.A.coeff(p, p);

  std::vector<Triplet> tp, tz, ts;
  PartRow row;
  const double dt = op.dt;
  for (int p = 0; p < np; ++p) {
    row.reset();
    const int i = g.ix(p), j = g.iy(p);
    for (int axis = 0; axis < g.dimension; ++axis) {
      const detail::AxisView view{&g, &fields.M, axis == 0 ? &fields.u : &fields.v, axis,
                                  axis == 0 ? j : i};
      const int a = axis == 0 ? i : j;
      const detail::AxisStencil st = detail::axis_stencil(view, a, g.order, op.diffusion, g.h);
      if (a % 2 == 0) {  // knot-parity axis row: wide couplings split
        const double p_left = dt * (st.e[0].adv + st.e[0].diff);
        const double q_left = dt * (st.e[1].adv + st.e[1].diff);
        const double q_right = dt * (st.e[3].adv + st.e[3].diff);
        const double p_right = dt * (st.e[4].adv + st.e[4].diff);
        const double pl_pos = std::max(p_left, 0.0), pr_pos = std::max(p_right, 0.0);
        row.at(view.col(a - 2)).ap += pl_pos;
        row.at(view.col(a - 2)).az += std::min(p_left, 0.0);
        row.at(view.col(a + 2)).ap += pr_pos;
        row.at(view.col(a + 2)).az += std::min(p_right, 0.0);
        row.at(view.col(a - 1)).az += q_left + pl_pos;
        row.at(view.col(a - 1)).as += -pl_pos;
        row.at(view.col(a + 1)).az += q_right + pr_pos;
        row.at(view.col(a + 1)).as += -pr_pos;
      } else {  // midline-parity axis row: everything off-diagonal is one-sided
        row.at(view.col(a - 1)).as += dt * (st.e[0].adv + st.e[0].diff);
        row.at(view.col(a + 1)).as += dt * (st.e[2].adv + st.e[2].diff);
      }
    }
    for (int k = 0; k < row.count; ++k) {
      const auto& s = row.s[k];
      if (s.col == p) throw std::logic_error("lorenz_split: wall fold reached the diagonal");
      if (s.ap != 0.0) tp.emplace_back(p, s.col, s.ap);
      if (s.az != 0.0) tz.emplace_back(p, s.col, s.az);
      if (s.as != 0.0) ts.emplace_back(p, s.col, s.as);
    }
  }
  out.A_a_plus.resize(np, np);
  out.A_a_plus.setFromTriplets(tp.begin(), tp.end());
  out.A_z.resize(np, np);
  out.A_z.setFromTriplets(tz.begin(), tz.end());
  out.A_s.resize(np, np);
  out.A_s.setFromTriplets(ts.begin(), ts.end());
  out.A_a_plus.makeCompressed();
  out.A_z.makeCompressed();
  out.A_s.makeCompressed();
  return out;
}

namespace {

std::pair<double, int> max_entry(const SparseMat& A) {
  double best = -kInf;
  int where = -1;
  for (int r = 0; r < A.outerSize(); ++r)
    for (SparseMat::InnerIterator it(A, r); it; ++it)
      if (it.value() > best) {
        best = it.value();
        where = static_cast<int>(it.row());
      }
  if (where < 0) {
    best = 0.0;
    where = 0;
  }
  return {best, where};
}

}  // namespace

std::vector<ConditionRecord> verify_lorenz(const LorenzSplitting& split, const SparseMat& A) {
  std::vector<ConditionRecord> out;

  WorstTracker parts;
  const auto [zmax, zwhere] = max_entry(split.A_z);
  const auto [smax, swhere] = max_entry(split.A_s);
  parts.update(-zmax, zwhere);
  parts.update(-smax, swhere);
  out.push_back(make_record("splitting-nonpositive-parts",
                            "every entry of the one-sided parts is <= 0", parts, false));

  WorstTracker diag;
  for (int p = 0; p < split.A_d.size(); ++p) diag.update(split.A_d[p], p);
  out.push_back(
      make_record("positive-diagonal", "diagonal part strictly positive", diag, true));

  Vector core = split.A_d + split.A_z * Vector::Ones(split.A_d.size());
  WorstTracker corew;
  for (int p = 0; p < core.size(); ++p) corew.update(core[p], p);
  out.push_back(make_record("core-row-sums",
                            "row sums of diagonal-plus-narrow part strictly positive", corew,
                            true));

  const Vector invd = split.A_d.cwiseInverse();
  SparseMat ds = split.A_s;
  for (int r = 0; r < ds.outerSize(); ++r)
    for (SparseMat::InnerIterator it(ds, r); it; ++it) it.valueRef() *= invd[r];
  SparseMat prod = SparseMat(split.A_z * ds);
  SparseMat gap = SparseMat(split.A_a_plus - prod);
  const auto [gmax, gwhere] = max_entry(gap);
  WorstTracker gw;
  gw.update(-gmax, gwhere);
  out.push_back(make_record("offdiagonal-product-bound",
                            "positive couplings dominated by the two-factor product", gw,
                            false));

  Vector rows = A * Vector::Ones(A.rows());
  WorstTracker rw;
  for (int p = 0; p < rows.size(); ++p) rw.update(rows[p], p);
  out.push_back(make_record("positive-row-action",
                            "A*1 strictly positive in every row", rw, true));
  return out;
}

std::vector<ConditionRecord> verify_m_matrix(const SparseMat& A) {
  std::vector<ConditionRecord> out;
  WorstTracker diag, offdiag, rowsum;
  for (int r = 0; r < A.outerSize(); ++r) {
    double rs = 0.0;
    for (SparseMat::InnerIterator it(A, r); it; ++it) {
      rs += it.value();
      if (it.col() == it.row())
        diag.update(it.value(), r);
      else
        offdiag.update(-it.value(), r);
    }
    rowsum.update(rs, r);
  }
  out.push_back(
      make_record("positive-diagonal", "diagonal entries strictly positive", diag, true));
  out.push_back(make_record("nonpositive-offdiagonal",
                            "off-diagonal entries all <= 0", offdiag, false));
  out.push_back(make_record("positive-row-sums",
                            "row sums strictly positive (diagonal dominance)", rowsum, true));
  return out;
}

OracleResult oracle_inverse_nonneg(const SparseMat& A, double rel_tol) {
  Matrix inv = dense_inverse(A);
  OracleResult res;
  res.min_entry = inv.minCoeff();
  res.inverse_scale = inv.cwiseAbs().maxCoeff();
  res.pass = res.min_entry >= -rel_tol * res.inverse_scale;
  return res;
}

MonotonicityReport certify(const SchemeOperator& op, const SampledFields& fields,
                           const CertifyOptions& opts) {
  MonotonicityReport rep =
      check_sufficient_conditions(op.grid, fields, op.diffusion, op.dt);
  if (op.order == SchemeOrder::Second) {
    rep.certificate = verify_m_matrix(op.A);
  } else {
    LorenzSplitting split = lorenz_split(op, fields);
    rep.certificate = verify_lorenz(split, op.A);
  }
  rep.verdict =
      rep.certificate_pass() ? Verdict::CertifiedMonotone : Verdict::ConditionsFail;
  if (opts.run_oracle) {
    rep.oracle = oracle_inverse_nonneg(op.A, opts.oracle_rel_tol);
    if (rep.verdict == Verdict::ConditionsFail && rep.oracle->pass)
      rep.verdict = Verdict::OracleOnly;
  }
  return rep;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedMonotone: return "CertifiedMonotone";
    case Verdict::ConditionsFail: return "ConditionsFail";
    case Verdict::OracleOnly: return "OracleOnly";
  }
  return "?";
}

namespace {

void print_records(std::ostringstream& os, const std::vector<ConditionRecord>& recs) {
  char buf[160];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof(buf), "  [%s] %-28s margin=%- .10e worst-point=%d\n",
                  r.pass ? "pass" : "FAIL", r.id.c_str(), r.margin, r.worst_point);
    os << buf << "        " << r.detail << "\n";
  }
}

}  // namespace

std::string report_text(const MonotonicityReport& rep) {
  std::ostringstream os;
  os << "monotonicity verdict: " << verdict_name(rep.verdict) << "\n";
  if (rep.derivative_source != DerivativeSource::None)
    os << "measure-derivative bound: "
       << (rep.derivative_source == DerivativeSource::Analytic ? "analytic sampler"
                                                               : "discrete surrogate")
       << "\n";
  os << "closed-form conditions:\n";
  print_records(os, rep.conditions);
  os << "certificate checks (assembled matrix):\n";
  print_records(os, rep.certificate);
  if (rep.oracle) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "oracle: min inverse entry %.10e, scale %.10e, %s\n", rep.oracle->min_entry,
                  rep.oracle->inverse_scale, rep.oracle->pass ? "nonnegative" : "NEGATIVE");
    os << buf;
  }
  return os.str();
}

std::string report_csv(const MonotonicityReport& rep) {
  std::ostringstream os;
  os << "condition,margin,pass,location\n";
  char buf[128];
  auto line = [&](const ConditionRecord& r) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%d,%d\n", r.id.c_str(), r.margin,
                  r.pass ? 1 : 0, r.worst_point);
    os << buf;
  };
  for (const auto& r : rep.conditions) line(r);
  for (const auto& r : rep.certificate) line(r);
  if (rep.oracle) {
    std::snprintf(buf, sizeof(buf), "oracle-min-inverse-entry,%.17g,%d,-1\n",
                  rep.oracle->min_entry, rep.oracle->pass ? 1 : 0);
    os << buf;
  }
  return os.str();
}

}  // namespace fpsolve
