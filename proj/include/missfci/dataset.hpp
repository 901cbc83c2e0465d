#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace missfci {

/// n x p value matrix with a missingness mask. Masked-out cells are set to
/// NaN so accidental reads surface immediately.
struct Dataset {
    Eigen::MatrixXd values;             // n x p
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // true = observed
    std::vector<std::string> column_names;

    Dataset() = default;
    Dataset(int n, int p);

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
    bool observed(int r, int c) const { return mask(r, c); }
    void mask_out(int r, int c);

    bool fully_observed() const { return mask.all(); }
};

/// CSV with a header row; missing cells are written empty.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

}  // namespace missfci
