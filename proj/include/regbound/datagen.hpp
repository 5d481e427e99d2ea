#pragma once

/**
 * Synthetic linear datasets with symmetric bounded noise, plus CSV I/O.
 *
 * Features are uniform on [-1, 1]^d. The ground truth is rescaled so that
 * ||w*||_1 + |b*| = 0.8 (B - amp), where amp is the largest noise magnitude,
 * which keeps every label inside [-B, B] without clipping.
 */

#include "adversarial.hpp"
#include "error.hpp"
#include "losses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace regbound {

struct NoiseSpec
{
    enum class Kind { two_point, uniform_sym, two_point_outliers };

    Kind kind = Kind::two_point;
    double a = 0.0;
    double outlier_frac = 0.0;
    double outlier_scale = 1.0;

    static NoiseSpec two_point(double a) { return checked({Kind::two_point, a, 0.0, 1.0}); }
    static NoiseSpec uniform_sym(double a) { return checked({Kind::uniform_sym, a, 0.0, 1.0}); }

    static NoiseSpec two_point_outliers(double a, double frac, double scale)
    {
        return checked({Kind::two_point_outliers, a, frac, scale});
    }

    // Largest |noise| the spec can produce.
    double amplitude() const
    {
        return kind == Kind::two_point_outliers && outlier_frac > 0.0 ? a * std::max(1.0, outlier_scale) : a;
    }

private:
    static NoiseSpec checked(NoiseSpec s)
    {
        if (!(s.a > 0.0) || !std::isfinite(s.a))
            throw invalid_argument("noise amplitude must be positive");
        if (!(s.outlier_frac >= 0.0 && s.outlier_frac <= 0.5))
            throw invalid_argument("outlier fraction must lie in [0, 0.5]");
        if (!(s.outlier_scale > 0.0) || !std::isfinite(s.outlier_scale))
            throw invalid_argument("outlier scale must be positive");
        return s;
    }
};

// "twopoint:A", "uniform:A" or "outliers:A,FRAC,SCALE".
inline NoiseSpec parse_noise_spec(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw parse_error("noise spec '" + std::string(text) + "' needs the form kind:params");
    const std::string_view kind = text.substr(0, colon);
    const std::string_view rest = text.substr(colon + 1);
    if (kind == "twopoint")
        return NoiseSpec::two_point(detail::parse_double(rest, "noise amplitude"));
    if (kind == "uniform")
        return NoiseSpec::uniform_sym(detail::parse_double(rest, "noise amplitude"));
    if (kind == "outliers") {
        std::vector<double> parts;
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const auto end = comma == std::string_view::npos ? rest.size() : comma;
            parts.push_back(detail::parse_double(rest.substr(start, end - start), "outlier noise parameter"));
            start = end + 1;
        }
        if (parts.size() != 3)
            throw parse_error("outliers noise needs a,frac,scale");
        return NoiseSpec::two_point_outliers(parts[0], parts[1], parts[2]);
    }
    throw parse_error("unknown noise kind '" + std::string(kind) + "' (expected twopoint|uniform|outliers)");
}

inline std::string to_string(const NoiseSpec& n)
{
    switch (n.kind) {
    case NoiseSpec::Kind::two_point:
        return "twopoint:" + detail::format_double(n.a);
    case NoiseSpec::Kind::uniform_sym:
        return "uniform:" + detail::format_double(n.a);
    case NoiseSpec::Kind::two_point_outliers:
        return "outliers:" + detail::format_double(n.a) + "," + detail::format_double(n.outlier_frac) + "," +
               detail::format_double(n.outlier_scale);
    }
    return {};
}

struct SynthConfig
{
    std::uint64_t seed = 0;
    int d = 1;
    int m = 1;
    double bound = 1.0;
    NoiseSpec noise = NoiseSpec::two_point(0.1);
};

struct SynthResult
{
    Dataset data;
    LinearModel truth;
};

inline SynthResult synth_linear_dataset(const SynthConfig& cfg)
{
    if (cfg.d < 1)
        throw invalid_argument("d must be >= 1");
    if (cfg.m < 1)
        throw invalid_argument("m must be >= 1");
    if (!(cfg.bound > 0.0))
        throw invalid_argument("B must be positive");
    const double amp = cfg.noise.amplitude();
    if (!(cfg.bound > amp))
        throw config_infeasible("noise amplitude " + std::to_string(amp) + " leaves no room inside B = " +
                                std::to_string(cfg.bound));

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    LinearModel truth;
    truth.weights.resize(static_cast<std::size_t>(cfg.d));
    double l1 = 0.0;
    for (double& w : truth.weights) {
        w = unit(rng);
        l1 += std::abs(w);
    }
    truth.bias = unit(rng);
    l1 += std::abs(truth.bias);
    const double target = 0.8 * (cfg.bound - amp);
    const double scale = l1 > 0.0 ? target / l1 : 0.0;
    for (double& w : truth.weights)
        w *= scale;
    truth.bias *= scale;

    SynthResult out;
    out.truth = truth;
    out.data.d = static_cast<std::size_t>(cfg.d);
    out.data.rows.reserve(static_cast<std::size_t>(cfg.m));
    for (int i = 0; i < cfg.m; ++i) {
        Sample row;
        row.features.resize(out.data.d);
        for (double& x : row.features)
            x = unit(rng);
        double noise = 0.0;
        const double sgn = u01(rng) < 0.5 ? -1.0 : 1.0;
        switch (cfg.noise.kind) {
        case NoiseSpec::Kind::two_point:
            noise = sgn * cfg.noise.a;
            break;
        case NoiseSpec::Kind::uniform_sym:
            noise = cfg.noise.a * unit(rng);
            break;
        case NoiseSpec::Kind::two_point_outliers: {
            const bool outlier = u01(rng) < cfg.noise.outlier_frac;
            noise = sgn * cfg.noise.a * (outlier ? cfg.noise.outlier_scale : 1.0);
            break;
        }
        }
        row.label = truth.predict(row.features) + noise;
        if (!(std::abs(row.label) <= cfg.bound))
            throw internal_consistency_error("generated label " + std::to_string(row.label) + " exceeds B");
        out.data.rows.push_back(std::move(row));
    }
    return out;
}

/// Seeded shuffle, then the first round(train_fraction * m) rows go to train.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw invalid_argument("train fraction must lie in (0, 1)");
    std::vector<std::size_t> order(data.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Fisher-Yates with explicit draws so the permutation does not depend on
    // the standard library's shuffle.
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(order.size())));
    std::pair<Dataset, Dataset> out;
    out.first.d = out.second.d = data.d;
    for (std::size_t k = 0; k < order.size(); ++k)
        (k < n_train ? out.first : out.second).rows.push_back(data.rows[order[k]]);
    return out;
}

namespace detail {

inline std::string shortest_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

inline void write_csv_dataset(const Dataset& data, std::ostream& os)
{
    for (std::size_t j = 0; j < data.d; ++j)
        os << 'f' << j << ',';
    os << "y\n";
    for (const Sample& row : data.rows) {
        for (double x : row.features)
            os << detail::shortest_double(x) << ',';
        os << detail::shortest_double(row.label) << '\n';
    }
}

inline void write_csv_dataset(const Dataset& data, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw invalid_argument("cannot open '" + path + "' for writing");
    write_csv_dataset(data, os);
    if (!os)
        throw invalid_argument("write to '" + path + "' failed");
}

struct CsvOptions
{
    bool has_header = true;
};

/// Numeric CSV with the label in the last column. Rows and columns in error
/// messages are 1-based and count the header line.
inline Dataset parse_csv_dataset(std::istream& is, CsvOptions options = {})
{
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    bool header_pending = options.has_header;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view view = detail::trim(line);
        if (view.empty())
            continue;
        const auto cells = detail::split_csv_line(view);
        if (columns == 0)
            columns = cells.size();
        else if (cells.size() != columns)
            throw dimension_mismatch("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                     " columns, expected " + std::to_string(columns));
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (columns < 2)
            throw parse_error("row " + std::to_string(line_no) + ": need at least one feature and a label");
        Sample row;
        row.features.reserve(columns - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string_view cell = detail::trim(cells[c]);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
                throw parse_error("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                  ": cannot parse '" + std::string(cell) + "' as a number");
            if (c + 1 == cells.size())
                row.label = v;
            else
                row.features.push_back(v);
        }
        data.rows.push_back(std::move(row));
    }
    if (data.rows.empty())
        throw parse_error("dataset has no data rows");
    data.d = columns - 1;
    return data;
}

inline Dataset load_csv_dataset(const std::string& path, CsvOptions options = {})
{
    std::ifstream is(path);
    if (!is)
        throw parse_error("cannot open '" + path + "'");
    return parse_csv_dataset(is, options);
}

} // namespace regbound
