#include "qdcca/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qdcca {

PairedDataset::PairedDataset(Matrix a, Matrix b, std::vector<std::size_t> class_sizes)
    : a_(std::move(a)), b_(std::move(b)), class_sizes_(std::move(class_sizes)) {
    if (a_.rows() < 1 || b_.rows() < 1) {
        throw std::invalid_argument("dataset needs p >= 1 and q >= 1");
    }
    if (class_sizes_.empty()) {
        throw std::invalid_argument("dataset needs at least one class");
    }
    if (a_.cols() != b_.cols()) {
        throw std::invalid_argument("A has " + std::to_string(a_.cols()) + " columns but B has " +
                                    std::to_string(b_.cols()));
    }
    std::size_t total = 0;
    offsets_.reserve(class_sizes_.size());
    for (auto size : class_sizes_) {
        if (size == 0) {
            throw std::invalid_argument("class sizes must be positive");
        }
        offsets_.push_back(total);
        total += size;
    }
    if (total != static_cast<std::size_t>(a_.cols())) {
        throw std::invalid_argument("class sizes sum to " + std::to_string(total) + " but there are " +
                                    std::to_string(a_.cols()) + " samples");
    }
}

std::size_t PairedDataset::max_class_size() const {
    return *std::max_element(class_sizes_.begin(), class_sizes_.end());
}

std::size_t PairedDataset::min_class_size() const {
    return *std::min_element(class_sizes_.begin(), class_sizes_.end());
}

std::size_t PairedDataset::class_offset(std::size_t cls) const { return offsets_.at(cls); }

Matrix PairedDataset::stacked() const {
    Matrix m(dim(), n());
    m.topRows(p()) = a_;
    m.bottomRows(q()) = b_;
    return m;
}

Real PairedDataset::max_abs_entry() const {
    return std::max(a_.cwiseAbs().maxCoeff(), b_.cwiseAbs().maxCoeff());
}

PaddedDataset PaddedDataset::from(const PairedDataset &data) {
    const auto width = data.max_class_size();
    const Matrix m = data.stacked();
    PaddedDataset out;
    out.block_width = width;
    out.padded_matrix = Matrix::Zero(data.dim(), data.classes() * width);
    for (std::size_t cls = 0; cls < data.classes(); ++cls) {
        const auto size = data.class_sizes()[cls];
        out.padded_matrix.middleCols(cls * width, size) = m.middleCols(data.class_offset(cls), size);
    }
    return out;
}

CenteredDataset mean_center(const PairedDataset &data) {
    CenteredDataset out;
    const auto n = static_cast<Real>(data.n());
    out.row_means.resize(data.dim());
    const Vector a_mean = data.a().rowwise().sum() / n;
    const Vector b_mean = data.b().rowwise().sum() / n;
    out.row_means << a_mean, b_mean;
    out.x_matrix = data.a().colwise() - a_mean;
    out.y_matrix = data.b().colwise() - b_mean;
    return out;
}

}  // namespace qdcca
