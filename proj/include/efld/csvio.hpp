#pragma once

#include <string>
#include <vector>

#include "efld/bound.hpp"

namespace efld {

// Fixed ledger schema; column order is part of the output contract.
extern const char* const kLedgerHeader;

void write_ledger_csv(const std::string& path, const BoundLedger& ledger);

// Parses a ledger CSV back into rows (contrib columns are reconstructed
// from the cumulative bounds where possible). Schema mismatches raise a
// format error naming the offending column.
BoundLedger read_ledger_csv(const std::string& path);

// Per-row median and interquartile range across several ledgers of equal
// length, written as t,epoch,<col>_med,<col>_q25,<col>_q75 for the value
// columns. Medians are permutation-invariant in the input order.
void write_aggregate_csv(const std::string& path, const std::vector<BoundLedger>& ledgers);

// Generic two-column helper for sweep outputs.
struct LongRow {
    double sweep_value;
    LedgerRow row;
};
void write_long_csv(const std::string& path, const std::string& axis_name,
                    const std::vector<LongRow>& rows);

double median_of(std::vector<double> v);
double quantile_of(std::vector<double> v, double q);

// Column accessor by schema name; unknown names raise a format error.
double ledger_field(const LedgerRow& row, const std::string& column);

}  // namespace efld
