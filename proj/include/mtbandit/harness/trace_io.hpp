#pragma once

#include <string>
#include <vector>

#include "mtbandit/harness/experiment.hpp"

namespace mtbandit::harness {

/// Header: t,lambda,x,y,beta,m_t,inst_regret,cum_regret,micros. Vectors are ';'-joined.
std::string trace_csv(const RunTrace& trace);
/// Header: t,m_t,indices (';'-joined history indices, 0-based).
std::string dictionary_csv(const std::vector<DictionaryRow>& rows);

struct SummaryRow {
    std::string algorithm;
    std::size_t t = 0;
    double mean_avg_regret = 0.0;
    double std_avg_regret = 0.0;
    double mean_cum_regret = 0.0;
    double realized_gain = 0.0;
    double bound_value = 0.0;
    double variance_sum = 0.0;
};

/// Per algorithm and round: mean and sample std over trials of R_C(t) / t, plus trial means of the
/// realized gain, the closed-form regret bound and the summed posterior variance norms.
std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results,
                                  const std::vector<std::string>& algorithm_order);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Throws ValidationError on anything that is not a well-formed, nonempty summary.
std::vector<SummaryRow> parse_summary_csv(const std::string& text);
std::vector<SummaryRow> read_summary(const std::string& path);

/// Header: algorithm,t,mean_bayes_regret,std_bayes_regret
std::string bayes_csv(const std::vector<TrialResult>& results, const std::vector<std::string>& algorithm_order);

/// Header: index,x,f  (the noiseless values of every Pareto-optimal grid point)
std::string pareto_csv(const Environment& env);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string sha256_hex(const std::string& data);

}  // namespace mtbandit::harness
