#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdcca/dataset.hpp"

namespace qdcca {

/// Malformed dataset text; line() is 1-based, 0 when no line applies.
class DatasetFormatError : public std::runtime_error {
  public:
    DatasetFormatError(std::size_t line, const std::string &what);
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// Header `# p=<int> q=<int> classes=<n_1,...,n_c>`, then p+q comma-separated rows of n numbers.
PairedDataset parse_dataset(std::istream &in);
PairedDataset load_dataset(const std::string &path);
void write_dataset(std::ostream &out, const PairedDataset &data);
std::string dataset_to_csv(const PairedDataset &data);
void save_dataset(const std::string &path, const PairedDataset &data);

enum class DensityMode { any, satisfy, violate };

struct GeneratorSpec {
    std::size_t p = 1;
    std::size_t q = 1;
    std::vector<std::size_t> class_sizes{2, 2};
    double value_range = 1.0;  // entries lie in [-value_range, value_range]
    double separation = 1.0;   // class offsets relative to noise; 0 makes classes identical in law
    DensityMode density = DensityMode::any;
    double m0 = 0.25;          // threshold on centered magnitudes for the satisfy/violate modes
    std::uint64_t seed = 1;

    void validate() const;
};

/// Seeded synthetic paired data. In satisfy mode at least half the centered entries of every row
/// have magnitude >= m0; in violate mode at least 60% are below m0.
PairedDataset generate_dataset(const GeneratorSpec &spec);

DensityMode parse_density_mode(const std::string &name);
std::string to_string(DensityMode mode);

/// Fraction of mean-centered entries of (A; B) with magnitude below m0.
double fraction_below(const PairedDataset &data, double m0);

}  // namespace qdcca
