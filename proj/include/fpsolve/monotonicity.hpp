#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpsolve/assembly.hpp"
#include "fpsolve/krylov.hpp"

namespace fpsolve {

enum class Verdict { CertifiedMonotone, ConditionsFail, OracleOnly };
enum class DerivativeSource { None, Analytic, Surrogate };

// margin is the slack of the inequality: satisfied iff margin >= 0
// (strict conditions require margin > 0). Units follow the inequality.
struct ConditionRecord {
  std::string id;
  std::string detail;
  double margin = 0.0;
  bool strict = false;
  bool pass = false;
  int worst_point = -1;
};

// A = diag(A_d) + A_a_plus + A_z + A_s with A_a_plus >= 0 (zero diagonal)
// and, when the splitting is valid, A_z <= 0 and A_s <= 0.
struct LorenzSplitting {
  Vector A_d;
  SparseMat A_a_plus;
  SparseMat A_z;
  SparseMat A_s;
};

struct OracleResult {
  double min_entry = 0.0;
  double inverse_scale = 0.0;  // max |A^-1| entry
  bool pass = false;
};

struct MonotonicityReport {
  // Closed-form mesh / time-step inequalities with their slacks. These are
  // a-priori sufficient bounds; the certificate checks below are evaluated
  // on the assembled matrix and decide the verdict.
  std::vector<ConditionRecord> conditions;
  std::vector<ConditionRecord> certificate;
  Verdict verdict = Verdict::ConditionsFail;
  DerivativeSource derivative_source = DerivativeSource::None;
  std::optional<OracleResult> oracle;

  bool conditions_pass() const;
  bool certificate_pass() const;
};

MonotonicityReport check_sufficient_conditions(const Grid& grid, const SampledFields& fields,
                                               double diffusion, double dt);

// Fourth-order schemes only; order 2 uses the plain M-matrix scan.
LorenzSplitting lorenz_split(const SchemeOperator& op, const SampledFields& fields);

// The three product-of-M-matrices checks on an assembled splitting:
// nonpositive parts + core M-matrix row sums, the off-diagonal product
// bound, and positive row action of A itself.
std::vector<ConditionRecord> verify_lorenz(const LorenzSplitting& split, const SparseMat& A);

// Sign pattern plus strictly positive row sums (diagonally dominant
// Z-matrix): the second-order monotonicity certificate.
std::vector<ConditionRecord> verify_m_matrix(const SparseMat& A);

// Dense-inverse oracle: pass iff min entry >= -rel_tol * max|A^-1|.
OracleResult oracle_inverse_nonneg(const SparseMat& A, double rel_tol = 1e-12);

struct CertifyOptions {
  bool run_oracle = false;
  double oracle_rel_tol = 1e-12;
};

MonotonicityReport certify(const SchemeOperator& op, const SampledFields& fields,
                           const CertifyOptions& opts = {});

std::string report_text(const MonotonicityReport& report);
std::string report_csv(const MonotonicityReport& report);
const char* verdict_name(Verdict v);

}  // namespace fpsolve
