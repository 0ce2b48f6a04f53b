#pragma once

#include <string>
#include <vector>

#include "mcsim/model.hpp"

namespace mcsim {

// Flat per-slot event stream, replayable offline. `amount` is the real part
// of an operation (input packets of the record's stage); dummies are kept
// separate so audits can exclude them per flow.
struct LedgerRecord {
    enum class Kind { Proc, Tx, Arrival, Delivery, Snapshot };

    long slot = 0;
    Kind kind = Kind::Proc;
    int node = -1;
    int peer = -1;  // Tx: receiving node; Delivery: destination member index
    int service = -1;
    int stage = 0;
    int dest_set = -1;
    Status q = 0;
    Status s = 0;   // operated status; equals q for arrivals/snapshots
    double amount = 0.0;
    double dummy = 0.0;  // Proc/Tx only
};

using Ledger = std::vector<LedgerRecord>;

void write_ledger_csv(const std::string& path, const Ledger& ledger);
Ledger read_ledger_csv(const std::string& path);

}  // namespace mcsim
