#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "missfci/causal_system.hpp"
#include "missfci/dataset.hpp"

namespace missfci {

enum class Strategy { TestWise, ListWise, Wrapper, Heuristic, Oracle };

const char* strategy_name(Strategy s);

/// One CI query's full record.
struct CIDecision {
    int i = -1, j = -1;
    std::vector<int> cond;     // sorted conditioning set
    Strategy strategy = Strategy::TestWise;
    long effective_n = 0;      // rows surviving deletion (0 for oracle)
    double p_value = 0.0;      // NaN for oracle decisions
    bool independent = false;
    bool degenerate = false;   // too few rows to test; forced independent
};

/// Rows whose mask is true for every variable in `vars`, ascending.
std::vector<int> testwise_rows(const Dataset& data, const std::vector<int>& vars);

/// Fisher's z partial-correlation test of i and j given w, using a covariance
/// matrix over the index set {i, j} union w (in that order is not required;
/// `idx_of` maps variable -> row of `cov`). Returns (p_value, independent).
struct FisherZResult {
    double p_value;
    bool independent;
    double partial_corr;
};
FisherZResult fisher_z(const Eigen::MatrixXd& cov, long effective_n, int i, int j,
                       const std::vector<int>& w,
                       const std::map<int, int>& idx_of, double alpha);

/// Partial correlation of variables 0 and 1 given the rest, from the inverse
/// of the covariance matrix; pseudo-inverse fallback past condition 1e12 and
/// the result clamped to (-1, 1).
double partial_correlation(const Eigen::MatrixXd& cov);

/// Uniform CI-decision interface consumed by discovery. decide() is memoized
/// on the canonical query key and appends each fresh evaluation to the log.
class CITester {
public:
    virtual ~CITester() = default;
    virtual int variable_count() const = 0;

    CIDecision decide(int i, int j, const std::vector<int>& cond);

    const std::vector<CIDecision>& log() const { return log_; }
    void clear_log() { log_.clear(); }

protected:
    virtual CIDecision evaluate(int i, int j, const std::vector<int>& cond) = 0;
    void record(const CIDecision& d) { log_.push_back(d); }

private:
    std::map<std::tuple<int, int, std::vector<int>>, CIDecision> memo_;
    std::vector<CIDecision> log_;
};

/// Finite-sample tester over incomplete data: Fisher's z after the deletion
/// strategy's row selection. Wrapper runs the test-wise query and, only when
/// it comes back independent, confirms with a list-wise query.
class DataCITester : public CITester {
public:
    DataCITester(const Dataset& data, Strategy strategy, double alpha);
    int variable_count() const override { return data_.cols(); }

protected:
    CIDecision evaluate(int i, int j, const std::vector<int>& cond) override;

private:
    CIDecision run_test(int i, int j, const std::vector<int>& cond,
                        const std::vector<int>& rows, Strategy label);

    const Dataset& data_;
    Strategy strategy_;
    double alpha_;
};

/// d-separation oracle tester. Modes:
///   FixedSel   — condition on a fixed selection set (e.g. S_l, S, or empty);
///   TestWise   — condition on S_{O_i O_j W} per query (heuristic oracle);
///   Wrapper    — test-wise query first, confirmed against S_l.
class OracleCITester : public CITester {
public:
    enum class Mode { FixedSel, TestWise, Wrapper };

    /// `columns[c]` gives the system vertex behind variable index c; defaults
    /// to sys.observed() when empty.
    OracleCITester(const CausalSystem& sys, Mode mode, std::vector<int> fixed_sel = {},
                   std::vector<int> columns = {});

    int variable_count() const override { return static_cast<int>(columns_.size()); }

protected:
    CIDecision evaluate(int i, int j, const std::vector<int>& cond) override;

private:
    const CausalSystem& sys_;
    Mode mode_;
    std::vector<int> fixed_sel_;
    std::vector<int> columns_;
};

/// Decision-log export: one CSV row per decision.
void write_decision_log_csv(std::ostream& out, const std::vector<CIDecision>& log);

}  // namespace missfci
