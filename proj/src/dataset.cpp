#include "missfci/dataset.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace missfci {

Dataset::Dataset(int n, int p) {
    if (n < 1 || p < 1) throw std::invalid_argument("Dataset requires n >= 1, p >= 1");
    values.setZero(n, p);
    mask.setConstant(n, p, true);
    column_names.resize(p);
    for (int c = 0; c < p; ++c) column_names[c] = "X" + std::to_string(c);
}

void Dataset::mask_out(int r, int c) {
    mask(r, c) = false;
    values(r, c) = std::numeric_limits<double>::quiet_NaN();
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (int c = 0; c < data.cols(); ++c) {
        if (c) out << ',';
        out << data.column_names[c];
    }
    out << '\n';
    std::ostringstream cell;
    cell.precision(17);
    for (int r = 0; r < data.rows(); ++r) {
        for (int c = 0; c < data.cols(); ++c) {
            if (c) out << ',';
            if (data.mask(r, c)) {
                cell.str("");
                cell << data.values(r, c);
                out << cell.str();
            }
        }
        out << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    std::vector<std::string> names;
    {
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) names.push_back(tok);
    }
    const int p = static_cast<int>(names.size());
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<bool>> masks;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals(p, std::numeric_limits<double>::quiet_NaN());
        std::vector<bool> obs(p, false);
        std::istringstream ls(line);
        std::string tok;
        int c = 0;
        while (c < p && std::getline(ls, tok, ',')) {
            if (!tok.empty()) {
                vals[c] = std::stod(tok);
                obs[c] = true;
            }
            ++c;
        }
        rows.push_back(std::move(vals));
        masks.push_back(std::move(obs));
    }
    if (rows.empty()) throw std::invalid_argument("CSV has no data rows");
    Dataset data(static_cast<int>(rows.size()), p);
    data.column_names = names;
    for (int r = 0; r < data.rows(); ++r)
        for (int c = 0; c < p; ++c) {
            data.values(r, c) = rows[r][c];
            data.mask(r, c) = masks[r][c];
        }
    return data;
}

}  // namespace missfci
