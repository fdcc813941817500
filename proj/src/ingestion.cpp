#include "mlutd/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <system_error>
#include <unordered_map>

#include "format.hpp"

namespace mlutd {

using detail::format_double;

namespace {

constexpr const char* kSpace = " \t\r\n\v\f";

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(kSpace);
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(kSpace);
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_comma(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string> split_whitespace(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const auto start = line.find_first_not_of(kSpace, pos);
        if (start == std::string::npos) break;
        const auto end = line.find_first_of(kSpace, start);
        fields.push_back(line.substr(start, end - start));
        if (end == std::string::npos) break;
        pos = end;
    }
    return fields;
}

bool has_space(const std::string& s) { return s.find_first_of(kSpace) != std::string::npos; }

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return in;
}

// Degree of every node touched by the period's edges, restricted to `keep` when given.
std::unordered_map<std::string, std::int64_t> count_degrees(const DirectedEdgeList& period,
                                                            const std::vector<std::string>* keep,
                                                            std::size_t* retained) {
    std::unordered_map<std::string, std::int64_t> deg;
    std::size_t copies = 0;
    auto member = [keep](const std::string& id) {
        return keep == nullptr || std::binary_search(keep->begin(), keep->end(), id);
    };
    for (const auto& e : period.edges) {
        if (!member(e.source) || !member(e.target)) continue;
        ++deg[e.source];
        ++deg[e.target];
        ++copies;
    }
    if (retained != nullptr) *retained = copies;
    return deg;
}

std::vector<std::string> node_set(const DirectedEdgeList& period) {
    std::vector<std::string> ids;
    ids.reserve(period.edges.size() * 2);
    for (const auto& e : period.edges) {
        ids.push_back(e.source);
        ids.push_back(e.target);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

double parse_number(const std::string& text, const std::string& source, std::size_t line) {
    double x = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, x);
    if (text.empty() || ec != std::errc{} || ptr != end) throw ParseError(source, line, "bad number '" + text + "'");
    return x;
}

}  // namespace

Delimiter parse_delimiter(const std::string& text) {
    if (text == "auto") return Delimiter::Auto;
    if (text == "whitespace") return Delimiter::Whitespace;
    if (text == "comma") return Delimiter::Comma;
    throw ParameterError("unknown delimiter '" + text + "' (expected auto, whitespace or comma)");
}

std::string to_string(Delimiter delimiter) {
    switch (delimiter) {
        case Delimiter::Auto: return "auto";
        case Delimiter::Whitespace: return "whitespace";
        case Delimiter::Comma: return "comma";
    }
    return "auto";
}

ParsedEdgeList parse_edge_list(std::istream& in, const std::string& label, Delimiter delimiter) {
    ParsedEdgeList out;
    out.list.label = label;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const bool comma =
            delimiter == Delimiter::Comma || (delimiter == Delimiter::Auto && line.find(',') != std::string::npos);
        const auto fields = comma ? split_comma(line) : split_whitespace(line);
        if (fields.size() < 2) {
            out.diagnostics.push_back({line_no, raw, "expected source and target"});
            continue;
        }
        if (fields[0].empty() || fields[1].empty()) {
            out.diagnostics.push_back({line_no, raw, "empty node id"});
            continue;
        }
        out.list.edges.push_back({fields[0], fields[1]});
    }
    if (out.list.edges.empty()) throw ParseError(label, line_no, "no valid edges");
    return out;
}

ParsedEdgeList read_edge_list_file(const std::string& path, Delimiter delimiter) {
    auto in = open_input(path);
    return parse_edge_list(in, path, delimiter);
}

void write_edge_list(std::ostream& out, const DirectedEdgeList& list) {
    bool spaces = false, commas = false;
    for (const auto& e : list.edges) {
        for (const std::string* id : {&e.source, &e.target}) {
            if (id->empty()) throw ParameterError("empty node id");
            spaces = spaces || has_space(*id);
            commas = commas || id->find(',') != std::string::npos;
        }
        if (e.source.front() == '#') throw ParameterError("node id '" + e.source + "' would read back as a comment");
    }
    if (spaces && commas) throw ParameterError("node ids mix whitespace and commas; no delimiter round-trips");
    const char* sep = spaces ? "," : " ";
    for (const auto& e : list.edges) out << e.source << sep << e.target << '\n';
}

PairedDegreeSeries paired_degrees(const DirectedEdgeList& period_1, const DirectedEdgeList& period_2) {
    if (period_1.edges.empty() || period_2.edges.empty()) throw DegenerateError("period has no edges");
    const auto nodes_1 = node_set(period_1);
    const auto nodes_2 = node_set(period_2);
    PairedDegreeSeries out;
    out.label = period_1.label + "-" + period_2.label;
    std::set_intersection(nodes_1.begin(), nodes_1.end(), nodes_2.begin(), nodes_2.end(),
                          std::back_inserter(out.nodes));
    if (out.nodes.empty())
        throw DegenerateError("periods " + period_1.label + " and " + period_2.label + " share no nodes");

    const auto deg_1 = count_degrees(period_1, &out.nodes, &out.retained_edges_1);
    const auto deg_2 = count_degrees(period_2, &out.nodes, &out.retained_edges_2);
    out.degrees_1.reserve(out.nodes.size());
    out.degrees_2.reserve(out.nodes.size());
    for (const auto& id : out.nodes) {
        const auto a = deg_1.find(id);
        const auto b = deg_2.find(id);
        out.degrees_1.push_back(a == deg_1.end() ? 0 : a->second);
        out.degrees_2.push_back(b == deg_2.end() ? 0 : b->second);
    }
    return out;
}

std::vector<std::int64_t> period_degrees(const DirectedEdgeList& period) {
    const auto deg = count_degrees(period, nullptr, nullptr);
    std::vector<std::int64_t> out;
    out.reserve(deg.size());
    for (const auto& id : node_set(period)) out.push_back(deg.at(id));
    return out;
}

std::vector<SeriesEntry> utd_series(const std::vector<DirectedEdgeList>& periods, const ThresholdSpec& spec) {
    if (periods.size() < 2) throw DomainError("UTD series needs at least two periods");
    std::vector<SeriesEntry> out;
    out.reserve(periods.size() - 1);
    for (std::size_t m = 0; m + 1 < periods.size(); ++m) {
        SeriesEntry entry;
        entry.pair = periods[m].label + "-" + periods[m + 1].label;
        try {
            const auto paired = paired_degrees(periods[m], periods[m + 1]);
            entry.intersection = paired.nodes.size();
            entry.estimate = utd_estimate(std::span<const std::int64_t>(paired.degrees_1),
                                          std::span<const std::int64_t>(paired.degrees_2), spec);
            entry.degenerate = entry.estimate.degenerate;
            if (entry.degenerate) entry.note = "no marginal exceedances";
        } catch (const DegenerateError& e) {
            entry.degenerate = true;
            entry.note = e.what();
        } catch (const DomainError& e) {
            entry.degenerate = true;
            entry.note = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

void write_series_csv(std::ostream& out, const std::vector<SeriesEntry>& series) {
    out << "pair,lambda,t_n,degenerate\n";
    for (const auto& e : series)
        out << e.pair << ',' << format_double(e.estimate.lambda_hat) << ',' << e.estimate.t_n << ','
            << (e.degenerate ? 1 : 0) << '\n';
}

std::vector<HillCheck> hill_checks(const std::vector<DirectedEdgeList>& periods, std::size_t k) {
    std::vector<HillCheck> out;
    for (const auto& period : periods) {
        HillCheck check;
        check.period = period.label;
        const auto deg = period_degrees(period);
        std::vector<double> sample(deg.begin(), deg.end());
        check.nodes = sample.size();
        check.k = k == 0 ? default_hill_k(sample.size()) : k;
        try {
            check.alpha = hill_tail_index(sample, check.k);
            check.in_range = check.alpha > 1.0 && check.alpha < 2.0;
            if (!check.in_range) check.note = "tail index outside (1, 2)";
        } catch (const DomainError& e) {
            check.alpha = std::numeric_limits<double>::quiet_NaN();
            check.note = e.what();
        }
        out.push_back(std::move(check));
    }
    return out;
}

void write_hill_csv(std::ostream& out, const std::vector<HillCheck>& checks) {
    out << "period,nodes,k,alpha,in_range\n";
    for (const auto& c : checks)
        out << c.period << ',' << c.nodes << ',' << c.k << ',' << format_double(c.alpha) << ','
            << (c.in_range ? 1 : 0) << '\n';
}

PriceSeries parse_price_csv(std::istream& in, const std::string& source) {
    PriceSeries out;
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto fields = split_comma(line);
        if (!header) {
            if (fields != std::vector<std::string>{"period", "initial_price", "final_price"})
                throw ParseError(source, line_no, "expected header 'period,initial_price,final_price'");
            header = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError(source, line_no, "expected 3 fields");
        if (fields[0].empty()) throw ParseError(source, line_no, "empty period label");
        const PricePeriod p{parse_number(fields[1], source, line_no), parse_number(fields[2], source, line_no)};
        if (!(p.initial > 0.0) || !(p.final > 0.0) || !std::isfinite(p.initial) || !std::isfinite(p.final))
            throw ParseError(source, line_no, "prices must be positive");
        if (!out.periods.emplace(fields[0], p).second)
            throw ParseError(source, line_no, "duplicate period '" + fields[0] + "'");
    }
    if (!header) throw ParseError(source, line_no, "missing header");
    return out;
}

PriceSeries read_price_csv(const std::string& path) {
    auto in = open_input(path);
    return parse_price_csv(in, path);
}

double shrinkage_ratio(const PriceSeries& series, const std::string& period) {
    const auto it = series.periods.find(period);
    if (it == series.periods.end()) throw std::out_of_range("no price data for period '" + period + "'");
    const PricePeriod& p = it->second;
    if (!(p.initial > 0.0) || !(p.final > 0.0)) throw DomainError("prices must be positive");
    return (p.initial - p.final) / p.initial;
}

Alignment parse_alignment(const std::string& text) {
    if (text == "second") return Alignment::SecondPeriod;
    if (text == "first") return Alignment::FirstPeriod;
    throw ParameterError("unknown alignment '" + text + "' (expected first or second)");
}

std::string to_string(Alignment alignment) {
    return alignment == Alignment::FirstPeriod ? "first" : "second";
}

std::vector<AlignedRow> align_series(const std::vector<SeriesEntry>& series,
                                     const std::vector<std::string>& period_labels, const PriceSeries& prices,
                                     Alignment alignment) {
    if (period_labels.size() != series.size() + 1)
        throw AlignmentError("expected " + std::to_string(series.size() + 1) + " period labels, got " +
                             std::to_string(period_labels.size()));
    std::vector<AlignedRow> rows;
    for (std::size_t m = 0; m < series.size(); ++m) {
        if (series[m].degenerate) continue;
        const std::string& period = period_labels[alignment == Alignment::SecondPeriod ? m + 1 : m];
        if (!prices.periods.contains(period))
            throw AlignmentError("pair " + series[m].pair + ": no price data for period '" + period + "'");
        rows.push_back({series[m].pair, series[m].estimate.lambda_hat, shrinkage_ratio(prices, period)});
    }
    return rows;
}

double correlate_series(const std::vector<double>& utd, const std::vector<double>& shrinkage) {
    if (utd.size() != shrinkage.size())
        throw AlignmentError("UTD series has " + std::to_string(utd.size()) + " values, shrinkage series " +
                             std::to_string(shrinkage.size()));
    return pearson_correlation(utd, shrinkage);
}

void write_aligned_csv(std::ostream& out, const std::vector<AlignedRow>& rows) {
    out << "pair,lambda,shrinkage\n";
    for (const auto& r : rows) out << r.pair << ',' << format_double(r.lambda) << ',' << format_double(r.shrinkage) << '\n';
}

}  // namespace mlutd
