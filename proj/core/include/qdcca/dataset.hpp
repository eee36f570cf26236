#pragma once

#include <cstddef>
#include <vector>

#include "qdcca/linalg.hpp"

namespace qdcca {

/// Two paired modalities A (p x n) and B (q x n) whose columns are grouped
/// contiguously by class.
class PairedDataset {
  public:
    PairedDataset(Matrix a, Matrix b, std::vector<std::size_t> class_sizes);

    const Matrix &a() const { return a_; }
    const Matrix &b() const { return b_; }
    const std::vector<std::size_t> &class_sizes() const { return class_sizes_; }

    std::size_t p() const { return static_cast<std::size_t>(a_.rows()); }
    std::size_t q() const { return static_cast<std::size_t>(b_.rows()); }
    std::size_t n() const { return static_cast<std::size_t>(a_.cols()); }
    std::size_t dim() const { return p() + q(); }
    std::size_t classes() const { return class_sizes_.size(); }
    std::size_t max_class_size() const;  // n'
    std::size_t min_class_size() const;  // n''
    std::size_t class_offset(std::size_t cls) const;

    /// M = (A; B), (p+q) x n.
    Matrix stacked() const;
    Real max_abs_entry() const;

  private:
    Matrix a_;
    Matrix b_;
    std::vector<std::size_t> class_sizes_;
    std::vector<std::size_t> offsets_;
};

/// Zero-padded class blocks: block i is [M^i, 0, ..., 0] of width n'.
struct PaddedDataset {
    Matrix padded_matrix;  // (p+q) x (c*n')
    std::size_t block_width = 0;

    static PaddedDataset from(const PairedDataset &data);
};

struct CenteredDataset {
    Matrix x_matrix;  // p x n
    Matrix y_matrix;  // q x n
    Vector row_means; // length p+q
};

CenteredDataset mean_center(const PairedDataset &data);

}  // namespace qdcca
