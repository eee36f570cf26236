#include "qdcca/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qdcca/random.hpp"

namespace qdcca {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string &text, std::size_t line, const std::string &what) {
    std::size_t value = 0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw DatasetFormatError(line, "bad " + what + " '" + text + "'");
    }
    return value;
}

double parse_number(const std::string &raw, std::size_t line) {
    const std::string text = trim(raw);
    double value = 0;
    const auto *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw DatasetFormatError(line, "bad number '" + text + "'");
    }
    return value;
}

struct Header {
    std::size_t p = 0;
    std::size_t q = 0;
    std::vector<std::size_t> classes;
};

Header parse_header(const std::string &line_text) {
    const std::string text = trim(line_text);
    if (text.empty() || text[0] != '#') {
        throw DatasetFormatError(1, "expected header '# p=<int> q=<int> classes=<n_1,...>'");
    }
    std::istringstream tokens(text.substr(1));
    Header h;
    bool seen_p = false;
    bool seen_q = false;
    bool seen_c = false;
    std::string tok;
    while (tokens >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            throw DatasetFormatError(1, "header token without '=': " + tok);
        }
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "p" && !seen_p) {
            h.p = parse_count(value, 1, "p");
            seen_p = true;
        } else if (key == "q" && !seen_q) {
            h.q = parse_count(value, 1, "q");
            seen_q = true;
        } else if (key == "classes" && !seen_c) {
            std::istringstream parts(value);
            std::string part;
            while (std::getline(parts, part, ',')) {
                h.classes.push_back(parse_count(part, 1, "class size"));
            }
            seen_c = true;
        } else {
            throw DatasetFormatError(1, "unexpected header key '" + key + "'");
        }
    }
    if (!seen_p || !seen_q || !seen_c) {
        throw DatasetFormatError(1, "header must give p, q and classes");
    }
    if (h.p == 0 || h.q == 0 || h.classes.empty() ||
        std::any_of(h.classes.begin(), h.classes.end(), [](std::size_t c) { return c == 0; })) {
        throw DatasetFormatError(1, "p, q and every class size must be positive");
    }
    return h;
}

}  // namespace

DatasetFormatError::DatasetFormatError(std::size_t line, const std::string &what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

PairedDataset parse_dataset(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DatasetFormatError(0, "empty dataset");
    }
    const Header h = parse_header(line);
    std::size_t n = 0;
    for (auto c : h.classes) {
        n += c;
    }
    const std::size_t rows = h.p + h.q;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    std::size_t row = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (row >= rows) {
            throw DatasetFormatError(line_no, "more than p+q = " + std::to_string(rows) + " data rows");
        }
        std::istringstream cells(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(cells, cell, ',')) {
            if (col >= n) {
                throw DatasetFormatError(line_no, "row has more than n = " + std::to_string(n) + " values");
            }
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = parse_number(cell, line_no);
            ++col;
        }
        if (col != n) {
            throw DatasetFormatError(line_no, "row has " + std::to_string(col) + " values, the classes need " +
                                                  std::to_string(n));
        }
        ++row;
    }
    if (row != rows) {
        throw DatasetFormatError(line_no, "expected " + std::to_string(rows) + " data rows, found " +
                                              std::to_string(row));
    }
    const auto p = static_cast<Eigen::Index>(h.p);
    return PairedDataset(m.topRows(p), m.bottomRows(static_cast<Eigen::Index>(h.q)), h.classes);
}

PairedDataset load_dataset(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset " + path);
    }
    return parse_dataset(in);
}

void write_dataset(std::ostream &out, const PairedDataset &data) {
    out << "# p=" << data.p() << " q=" << data.q() << " classes=";
    for (std::size_t i = 0; i < data.classes(); ++i) {
        out << (i ? "," : "") << data.class_sizes()[i];
    }
    out << '\n';
    const Matrix m = data.stacked();
    char buf[64];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            // shortest text that parses back to the same double
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(r, c));
            (void)ec;
            if (c) {
                out << ',';
            }
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

std::string dataset_to_csv(const PairedDataset &data) {
    std::ostringstream out;
    write_dataset(out, data);
    return out.str();
}

void save_dataset(const std::string &path, const PairedDataset &data) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    write_dataset(out, data);
}

void GeneratorSpec::validate() const {
    if (p == 0 || q == 0 || class_sizes.empty()) {
        throw std::invalid_argument("generator needs p, q >= 1 and at least one class");
    }
    if (std::any_of(class_sizes.begin(), class_sizes.end(), [](std::size_t c) { return c == 0; })) {
        throw std::invalid_argument("class sizes must be positive");
    }
    if (!(value_range > 0) || !(separation >= 0)) {
        throw std::invalid_argument("value_range must be positive and separation non-negative");
    }
    if (density != DensityMode::any && !(m0 > 0 && 2 * m0 < value_range)) {
        throw std::invalid_argument("density modes need 0 < m0 < value_range / 2");
    }
}

namespace {

// Zero-mean row whose magnitudes come in +/- pairs: a fraction `big` of them in [lo_big, hi],
// the rest in [0, lo_small).
std::vector<double> paired_row(std::size_t n, double big, double m0, double hi, Rng &rng) {
    std::vector<double> row(n, 0.0);
    const std::size_t pairs = n / 2;
    const auto big_pairs = static_cast<std::size_t>(std::floor(big * static_cast<double>(pairs) + 1e-9));
    for (std::size_t k = 0; k < pairs; ++k) {
        const double v = k < big_pairs ? m0 + (hi - m0) * uniform01(rng) : 0.9 * m0 * uniform01(rng);
        row[2 * k] = v;
        row[2 * k + 1] = -v;
    }
    std::shuffle(row.begin(), row.end(), rng);
    return row;
}

}  // namespace

PairedDataset generate_dataset(const GeneratorSpec &spec) {
    spec.validate();
    Rng rng = make_rng(spec.seed, 0);
    std::size_t n = 0;
    for (auto c : spec.class_sizes) {
        n += c;
    }
    const std::size_t rows = spec.p + spec.q;
    const double half = spec.value_range / 2;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    auto u = [&] { return 2 * uniform01(rng) - 1; };
    for (std::size_t r = 0; r < rows; ++r) {
        const auto er = static_cast<Eigen::Index>(r);
        if (spec.density == DensityMode::any) {
            const double w = std::min(spec.separation, 4.0) / (1 + std::min(spec.separation, 4.0));
            std::size_t col = 0;
            for (auto size : spec.class_sizes) {
                const double offset = w * u();
                for (std::size_t j = 0; j < size; ++j, ++col) {
                    m(er, static_cast<Eigen::Index>(col)) = spec.value_range * (offset + (1 - w) * u());
                }
            }
        } else {
            // odd n leaves one zero entry: (n-1)/2 pairs of which all or 30% are above m0
            const double big = spec.density == DensityMode::satisfy ? 1.0 : 0.3;
            const auto row = paired_row(n, big, spec.m0, half, rng);
            const double offset = half * u();
            for (std::size_t j = 0; j < n; ++j) {
                m(er, static_cast<Eigen::Index>(j)) = row[j] + offset;
            }
        }
    }
    const auto p = static_cast<Eigen::Index>(spec.p);
    return PairedDataset(m.topRows(p), m.bottomRows(static_cast<Eigen::Index>(spec.q)), spec.class_sizes);
}

DensityMode parse_density_mode(const std::string &name) {
    if (name == "any") {
        return DensityMode::any;
    }
    if (name == "satisfy") {
        return DensityMode::satisfy;
    }
    if (name == "violate") {
        return DensityMode::violate;
    }
    throw std::invalid_argument("density mode must be any, satisfy or violate, got '" + name + "'");
}

std::string to_string(DensityMode mode) {
    switch (mode) {
    case DensityMode::satisfy:
        return "satisfy";
    case DensityMode::violate:
        return "violate";
    default:
        return "any";
    }
}

double fraction_below(const PairedDataset &data, double m0) {
    const CenteredDataset c = mean_center(data);
    const auto count = (c.x_matrix.array().abs() < m0).count() + (c.y_matrix.array().abs() < m0).count();
    return static_cast<double>(count) / static_cast<double>(data.n() * data.dim());
}

}  // namespace qdcca
