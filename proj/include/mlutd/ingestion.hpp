#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mlutd/tailstats.hpp"

namespace mlutd {

struct DirectedEdge {
    std::string source;
    std::string target;

    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Directed interactions for one period; repeated edges are kept.
struct DirectedEdgeList {
    std::string label;
    std::vector<DirectedEdge> edges;

    friend bool operator==(const DirectedEdgeList&, const DirectedEdgeList&) = default;
};

enum class Delimiter { Auto, Whitespace, Comma };

Delimiter parse_delimiter(const std::string& text);
std::string to_string(Delimiter delimiter);

struct LineDiagnostic {
    std::size_t line = 0;  // 1-based
    std::string text;
    std::string reason;
};

struct ParsedEdgeList {
    DirectedEdgeList list;
    std::vector<LineDiagnostic> diagnostics;
};

/// One "source<delim>target[<delim>ignored...]" per line; blank lines and lines
/// starting with '#' are skipped. Throws ParseError when no edge survives.
ParsedEdgeList parse_edge_list(std::istream& in, const std::string& label, Delimiter delimiter = Delimiter::Auto);
ParsedEdgeList read_edge_list_file(const std::string& path, Delimiter delimiter = Delimiter::Auto);

/// Whitespace-delimited, re-readable by parse_edge_list.
void write_edge_list(std::ostream& out, const DirectedEdgeList& list);

/// Undirected degrees of the nodes present in both periods, in sorted id order.
struct PairedDegreeSeries {
    std::string label;  // "<first>-<second>"
    std::vector<std::string> nodes;
    std::vector<std::int64_t> degrees_1;
    std::vector<std::int64_t> degrees_2;
    std::size_t retained_edges_1 = 0;
    std::size_t retained_edges_2 = 0;
};

/// Every directed edge copy between intersection nodes adds 1 to its source
/// and 1 to its target (a self-reply adds 2). Throws DegenerateError on an
/// empty intersection.
PairedDegreeSeries paired_degrees(const DirectedEdgeList& period_1, const DirectedEdgeList& period_2);

/// Undirected degree of every node of one period (no intersection), sorted by id.
std::vector<std::int64_t> period_degrees(const DirectedEdgeList& period);

struct SeriesEntry {
    std::string pair;
    UtdEstimate estimate;
    std::size_t intersection = 0;
    bool degenerate = false;
    std::string note;
};

/// UTD of each consecutive period pair; n periods give n - 1 entries.
/// Pairs that cannot be estimated are kept and flagged.
std::vector<SeriesEntry> utd_series(const std::vector<DirectedEdgeList>& periods, const ThresholdSpec& spec);

void write_series_csv(std::ostream& out, const std::vector<SeriesEntry>& series);

/// Hill tail index of one period's full degree sample.
struct HillCheck {
    std::string period;
    std::size_t nodes = 0;
    std::size_t k = 0;
    double alpha = 0.0;  // NaN when undefined
    bool in_range = false;  // 1 < alpha < 2
    std::string note;
};

/// k = 0 selects ceil(0.05 N).
std::vector<HillCheck> hill_checks(const std::vector<DirectedEdgeList>& periods, std::size_t k = 0);

void write_hill_csv(std::ostream& out, const std::vector<HillCheck>& checks);

struct PricePeriod {
    double initial = 0.0;
    double final = 0.0;
};

struct PriceSeries {
    std::map<std::string, PricePeriod> periods;
};

/// Requires the header period,initial_price,final_price.
PriceSeries parse_price_csv(std::istream& in, const std::string& source);
PriceSeries read_price_csv(const std::string& path);

/// (initial - final) / initial for the given period.
double shrinkage_ratio(const PriceSeries& series, const std::string& period);

/// Which period of a pair (m, m+1) a UTD value is matched with.
enum class Alignment { SecondPeriod, FirstPeriod };

Alignment parse_alignment(const std::string& text);
std::string to_string(Alignment alignment);

struct AlignedRow {
    std::string pair;
    double lambda = 0.0;
    double shrinkage = 0.0;
};

/// Non-degenerate series entries matched with the shrinkage of the aligned
/// period. Throws AlignmentError when a price period is missing.
std::vector<AlignedRow> align_series(const std::vector<SeriesEntry>& series,
                                     const std::vector<std::string>& period_labels, const PriceSeries& prices,
                                     Alignment alignment);

double correlate_series(const std::vector<double>& utd, const std::vector<double>& shrinkage);

void write_aligned_csv(std::ostream& out, const std::vector<AlignedRow>& rows);

}  // namespace mlutd
