#include "okselect/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "okselect/errors.hpp"

namespace okselect {

namespace {

bool parse_double(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);  // libsvm "+1"
    if (token.empty()) return false;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

std::vector<std::string_view> split_char(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Task task_from_name(const std::string& name) {
    if (name == "cls" || name == "classification") return Task::classification;
    if (name == "reg" || name == "regression") return Task::regression;
    throw InvalidInput("unknown task: " + name);
}

Dataset parse_libsvm(std::string_view text, std::vector<std::string>* warnings) {
    struct Row {
        double label;
        std::vector<std::pair<int, double>> entries;
    };
    std::vector<Row> rows;
    int max_index = 0;
    long line_no = 0;
    std::size_t pos = 0;

    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = nl == std::string_view::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        const auto tokens = split_ws(line);
        Row row;
        if (!parse_double(tokens[0], row.label)) {
            throw ParseError("libsvm line " + std::to_string(line_no) + ": bad label '" +
                             std::string(tokens[0]) + "'");
        }
        std::set<int> seen;
        for (std::size_t k = 1; k < tokens.size(); ++k) {
            const std::size_t colon = tokens[k].find(':');
            if (colon == std::string_view::npos) {
                throw ParseError("libsvm line " + std::to_string(line_no) +
                                 ": token without ':' -> '" + std::string(tokens[k]) + "'");
            }
            double index_val = 0.0;
            double value = 0.0;
            if (!parse_double(tokens[k].substr(0, colon), index_val) ||
                index_val < 1.0 || index_val != std::floor(index_val)) {
                throw ParseError("libsvm line " + std::to_string(line_no) +
                                 ": bad feature index in '" + std::string(tokens[k]) + "'");
            }
            if (!parse_double(tokens[k].substr(colon + 1), value)) {
                throw ParseError("libsvm line " + std::to_string(line_no) +
                                 ": bad feature value in '" + std::string(tokens[k]) + "'");
            }
            const int index = static_cast<int>(index_val);
            if (!seen.insert(index).second && warnings) {
                warnings->push_back("libsvm line " + std::to_string(line_no) +
                                    ": duplicate index " + std::to_string(index) +
                                    ", last value wins");
            }
            row.entries.emplace_back(index, value);
            max_index = std::max(max_index, index);
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw ParseError("libsvm: no data rows");
    if (max_index == 0) throw ParseError("libsvm: no features present");

    Dataset data;
    data.rows = static_cast<long>(rows.size());
    data.dim = max_index;
    data.features.assign(static_cast<std::size_t>(data.rows) * data.dim, 0.0);
    data.labels.resize(static_cast<std::size_t>(data.rows));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        data.labels[r] = rows[r].label;
        for (const auto& [index, value] : rows[r].entries) {
            data.features[r * static_cast<std::size_t>(data.dim) +
                          static_cast<std::size_t>(index - 1)] = value;  // last value wins
        }
    }
    return data;
}

Dataset parse_csv(std::string_view text, int label_column,
                  std::vector<std::string>* warnings) {
    (void)warnings;
    std::vector<std::vector<double>> grid;
    long line_no = 0;
    bool header_checked = false;
    std::size_t pos = 0;

    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = nl == std::string_view::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;

        const auto fields = split_char(line, ',');
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_double(trim(fields[c]), row[c])) {
                numeric = false;
                if (header_checked) {
                    throw ParseError("csv line " + std::to_string(line_no) + " column " +
                                     std::to_string(c + 1) + ": non-numeric cell '" +
                                     std::string(trim(fields[c])) + "'");
                }
                break;
            }
        }
        if (!header_checked) {
            header_checked = true;
            if (!numeric) continue;  // header row
        }
        if (!grid.empty() && row.size() != grid.front().size()) {
            throw ParseError("csv line " + std::to_string(line_no) + ": ragged row (" +
                             std::to_string(row.size()) + " fields, expected " +
                             std::to_string(grid.front().size()) + ")");
        }
        grid.push_back(std::move(row));
    }

    if (grid.empty()) throw ParseError("csv: no data rows");
    const int columns = static_cast<int>(grid.front().size());
    if (columns < 2) throw ParseError("csv: need at least one feature column besides the label");
    if (label_column < 0 || label_column >= columns) {
        throw ParseError("csv: label column " + std::to_string(label_column) +
                         " out of range for " + std::to_string(columns) + " columns");
    }

    Dataset data;
    data.rows = static_cast<long>(grid.size());
    data.dim = columns - 1;
    data.features.reserve(static_cast<std::size_t>(data.rows) * data.dim);
    data.labels.reserve(static_cast<std::size_t>(data.rows));
    for (const auto& row : grid) {
        for (int c = 0; c < columns; ++c) {
            if (c == label_column) {
                data.labels.push_back(row[static_cast<std::size_t>(c)]);
            } else {
                data.features.push_back(row[static_cast<std::size_t>(c)]);
            }
        }
    }
    return data;
}

std::string serialize_libsvm(const Dataset& data) {
    std::ostringstream out;
    out.precision(17);
    for (long r = 0; r < data.rows; ++r) {
        out << data.labels[static_cast<std::size_t>(r)];
        const auto row = data.row(r);
        for (int c = 0; c < data.dim; ++c) {
            if (row[static_cast<std::size_t>(c)] != 0.0) {
                out << ' ' << (c + 1) << ':' << row[static_cast<std::size_t>(c)];
            }
        }
        out << '\n';
    }
    return out.str();
}

Dataset preprocess(const Dataset& raw, Task task) {
    if (raw.rows < 2) throw InvalidInput("preprocess: need at least 2 rows");
    Dataset data = raw;
    data.task = task;

    for (int c = 0; c < data.dim; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (long r = 0; r < data.rows; ++r) {
            const double v =
                data.features[static_cast<std::size_t>(r) * data.dim + static_cast<std::size_t>(c)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (long r = 0; r < data.rows; ++r) {
            double& v =
                data.features[static_cast<std::size_t>(r) * data.dim + static_cast<std::size_t>(c)];
            v = hi > lo ? -1.0 + 2.0 * (v - lo) / (hi - lo) : 0.0;
        }
    }

    if (task == Task::classification) {
        std::set<double> values(data.labels.begin(), data.labels.end());
        if (values.size() > 2) {
            throw InvalidInput("preprocess: classification needs exactly 2 label values, got " +
                               std::to_string(values.size()));
        }
        const double lo = *values.begin();
        for (double& y : data.labels) y = y == lo && values.size() == 2 ? -1.0 : 1.0;
    } else {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double y : data.labels) {
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        for (double& y : data.labels) y = hi > lo ? (y - lo) / (hi - lo) : 0.0;
    }
    return data;
}

StreamOrder permute(long rows, std::uint64_t seed) {
    if (rows < 1) throw InvalidInput("permute: rows must be >= 1");
    StreamOrder order;
    order.seed = seed;
    order.permutation.resize(static_cast<std::size_t>(rows));
    for (long i = 0; i < rows; ++i) order.permutation[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(seed);
    for (long i = rows - 1; i > 0; --i) {
        std::uniform_int_distribution<long> pick(0, i);
        std::swap(order.permutation[static_cast<std::size_t>(i)],
                  order.permutation[static_cast<std::size_t>(pick(rng))]);
    }
    return order;
}

StreamOrder truncate(StreamOrder order, long limit) {
    if (limit < 1) throw InvalidInput("truncate: limit must be >= 1");
    if (limit < static_cast<long>(order.permutation.size())) {
        order.permutation.resize(static_cast<std::size_t>(limit));
    }
    return order;
}

Dataset synth_rkhs_regression(long rows, int dim, const KernelSpec& spec, double radius,
                              double noise, std::uint64_t seed) {
    if (rows < 1 || dim < 1) throw InvalidInput("synth_rkhs_regression: bad shape");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const int anchors = 25;
    std::vector<double> anchor_points(static_cast<std::size_t>(anchors) * dim);
    for (double& v : anchor_points) v = unit(rng);
    // Nonnegative coefficients keep the target inside [0, amplitude] and the
    // norm at most amplitude.
    const double amplitude = std::min(0.9, 0.9 * radius);
    const double coeff = amplitude / anchors;

    Dataset data;
    data.name = "synthetic-rkhs";
    data.task = Task::regression;
    data.rows = rows;
    data.dim = dim;
    data.features.resize(static_cast<std::size_t>(rows) * dim);
    data.labels.resize(static_cast<std::size_t>(rows));
    for (double& v : data.features) v = unit(rng);

    std::normal_distribution<double> perturb(0.0, noise);
    for (long r = 0; r < rows; ++r) {
        const auto x = data.row(r);
        double y = 0.0;
        for (int a = 0; a < anchors; ++a) {
            const std::span<const double> anchor{
                anchor_points.data() + static_cast<std::size_t>(a) * dim,
                static_cast<std::size_t>(dim)};
            y += coeff * kernel_eval(spec, anchor, x);
        }
        if (noise > 0.0) y += perturb(rng);
        data.labels[static_cast<std::size_t>(r)] = std::clamp(y, 0.0, 1.0);
    }
    return data;
}

}  // namespace okselect
