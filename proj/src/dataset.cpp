#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ghost2 {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) return false;
    return std::isfinite(out);
}

bool parse_int64(const std::string& s, std::int64_t& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::size_t WarningDataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void WarningDataset::validate() const {
    const std::size_t n = features.rows;
    if (labels.size() != n || timestamps.size() != n)
        throw Error(ErrorCode::LengthMismatch, "features, labels, timestamps must have equal length");
    if (n > 0 && features.cols < 1)
        throw Error(ErrorCode::InvalidArgument, "dataset needs at least one feature column");
    if (feature_names.size() != features.cols)
        throw Error(ErrorCode::LengthMismatch, "feature_names size must equal feature columns");
    for (double v : features.vals) {
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonNumericCell, "non-finite feature value");
    }
    for (int y : labels) {
        if (y != 0 && y != 1)
            throw Error(ErrorCode::BadLabel, "labels must be 0 or 1");
    }
}

std::uint64_t WarningDataset::digest() const {
    std::uint64_t h = fnv1a64(project);
    auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
    mix(features.rows);
    mix(features.cols);
    for (double v : features.vals) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    }
    for (int y : labels) mix(static_cast<std::uint64_t>(y));
    for (std::int64_t t : timestamps) mix(static_cast<std::uint64_t>(t));
    return h;
}

WarningDataset WarningDataset::subset(const std::vector<std::size_t>& row_indices) const {
    WarningDataset out;
    out.project = project;
    out.feature_names = feature_names;
    out.features = Matrix(0, features.cols);
    out.features.vals.reserve(row_indices.size() * features.cols);
    out.labels.reserve(row_indices.size());
    out.timestamps.reserve(row_indices.size());
    for (std::size_t r : row_indices) {
        out.features.push_row(features.row(r));
        out.labels.push_back(labels[r]);
        out.timestamps.push_back(timestamps[r]);
    }
    return out;
}

WarningDataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::EmptyDataset, path + ": empty file");

    const std::vector<std::string> header = split_line(line);
    long label_col = -1, ts_col = -1, project_col = -1;
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == schema.label_column) {
            label_col = static_cast<long>(i);
        } else if (name == schema.timestamp_column) {
            ts_col = static_cast<long>(i);
        } else if (name == schema.project_column) {
            project_col = static_cast<long>(i);
        } else {
            feature_cols.push_back(i);
            feature_names.push_back(name);
        }
    }
    if (label_col < 0)
        throw Error(ErrorCode::MissingColumn, path + ": missing column '" + schema.label_column + "'");
    if (ts_col < 0)
        throw Error(ErrorCode::MissingColumn, path + ": missing column '" + schema.timestamp_column + "'");
    if (feature_cols.empty())
        throw Error(ErrorCode::MissingColumn, path + ": no feature columns");

    WarningDataset data;
    data.feature_names = feature_names;
    data.features = Matrix(0, feature_cols.size());
    data.project = std::filesystem::path(path).stem().string();

    std::size_t row = 0;
    std::vector<double> feat_row(feature_cols.size());
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::BadFormat,
                        path + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            if (!parse_double(cells[feature_cols[j]], feat_row[j])) {
                throw Error(ErrorCode::NonNumericCell,
                            path + ": non-numeric cell at row " + std::to_string(row) +
                                ", column '" + feature_names[j] + "'");
            }
        }
        double label_val = 0.0;
        if (!parse_double(cells[static_cast<std::size_t>(label_col)], label_val) ||
            (label_val != 0.0 && label_val != 1.0)) {
            throw Error(ErrorCode::BadLabel,
                        path + ": bad label at row " + std::to_string(row));
        }
        std::int64_t ts = 0;
        if (!parse_int64(cells[static_cast<std::size_t>(ts_col)], ts)) {
            throw Error(ErrorCode::NonNumericCell,
                        path + ": non-integer timestamp at row " + std::to_string(row));
        }
        if (project_col >= 0 && row == 0) {
            const std::string p = trim(cells[static_cast<std::size_t>(project_col)]);
            if (!p.empty()) data.project = p;
        }
        data.features.push_row(feat_row.data());
        data.labels.push_back(static_cast<int>(label_val));
        data.timestamps.push_back(ts);
        ++row;
    }
    if (data.rows() == 0)
        throw Error(ErrorCode::EmptyDataset, path + ": no data rows");
    data.validate();
    return data;
}

void write_csv(const WarningDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
        out << data.feature_names[j] << ',';
    }
    out << "label,timestamp\n";
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            out << format_double(data.features.at(r, j)) << ',';
        }
        out << data.labels[r] << ',' << data.timestamps[r] << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

TrainTestSplit time_split(const WarningDataset& data, double train_fraction) {
    const std::size_t n = data.rows();
    if (n < 2) throw Error(ErrorCode::TooFewRows, "time_split needs at least 2 rows");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "train_fraction must be in (0,1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // stable: timestamp ties keep original file order
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.timestamps[a] < data.timestamps[b];
    });

    std::size_t k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    if (n <= 4 || k == 0 || k == n) k = n / 2;  // 50:50 fallback for tiny or degenerate cuts

    TrainTestSplit split;
    split.train_fraction = train_fraction;
    split.train = data.subset({order.begin(), order.begin() + static_cast<long>(k)});
    split.test = data.subset({order.begin() + static_cast<long>(k), order.end()});
    return split;
}

void NormParams::apply(Matrix& m, bool clamp) const {
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double lo = mins[c], hi = maxs[c];
            double v;
            if (hi == lo) {
                v = 0.5;
            } else {
                v = (m.at(r, c) - lo) / (hi - lo);
            }
            if (clamp) v = std::clamp(v, -0.5, 1.5);
            m.at(r, c) = v;
        }
    }
}

std::pair<TrainTestSplit, NormParams> normalize(const TrainTestSplit& split) {
    if (split.train.rows() == 0)
        throw Error(ErrorCode::EmptyDataset, "normalize: empty training set");
    const std::size_t d = split.train.cols();
    NormParams params;
    params.mins.assign(d, 0.0);
    params.maxs.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = split.train.features.at(0, c);
        double hi = lo;
        for (std::size_t r = 1; r < split.train.rows(); ++r) {
            lo = std::min(lo, split.train.features.at(r, c));
            hi = std::max(hi, split.train.features.at(r, c));
        }
        params.mins[c] = lo;
        params.maxs[c] = hi;
    }
    TrainTestSplit out = split;
    params.apply(out.train.features, /*clamp=*/false);
    params.apply(out.test.features, /*clamp=*/true);
    return {std::move(out), std::move(params)};
}

}  // namespace ghost2
