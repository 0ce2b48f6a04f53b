#include "mcsim/ledger.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcsim {

namespace {

const char* kind_name(LedgerRecord::Kind k) {
    switch (k) {
        case LedgerRecord::Kind::Proc: return "proc";
        case LedgerRecord::Kind::Tx: return "tx";
        case LedgerRecord::Kind::Arrival: return "arrival";
        case LedgerRecord::Kind::Delivery: return "delivery";
        case LedgerRecord::Kind::Snapshot: return "snapshot";
    }
    return "?";
}

LedgerRecord::Kind parse_kind(const std::string& s) {
    if (s == "proc") return LedgerRecord::Kind::Proc;
    if (s == "tx") return LedgerRecord::Kind::Tx;
    if (s == "arrival") return LedgerRecord::Kind::Arrival;
    if (s == "delivery") return LedgerRecord::Kind::Delivery;
    if (s == "snapshot") return LedgerRecord::Kind::Snapshot;
    throw std::invalid_argument("unknown ledger record kind: " + s);
}

}  // namespace

void write_ledger_csv(const std::string& path, const Ledger& ledger) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open ledger file for writing: " + path);
    out << "slot,kind,node,peer,service,stage,dest_set,q,s,amount,dummy\n";
    out.precision(17);
    for (const auto& r : ledger) {
        out << r.slot << ',' << kind_name(r.kind) << ',' << r.node << ',' << r.peer << ','
            << r.service << ',' << r.stage << ',' << r.dest_set << ',' << r.q << ',' << r.s << ','
            << r.amount << ',' << r.dummy << '\n';
    }
}

Ledger read_ledger_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ledger file: " + path);
    Ledger ledger;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty ledger file: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        auto next = [&] {
            if (!std::getline(ss, field, ',')) throw std::runtime_error("malformed ledger row");
            return field;
        };
        LedgerRecord r;
        r.slot = std::stol(next());
        r.kind = parse_kind(next());
        r.node = std::stoi(next());
        r.peer = std::stoi(next());
        r.service = std::stoi(next());
        r.stage = std::stoi(next());
        r.dest_set = std::stoi(next());
        r.q = static_cast<Status>(std::stoul(next()));
        r.s = static_cast<Status>(std::stoul(next()));
        r.amount = std::stod(next());
        r.dummy = std::stod(next());
        ledger.push_back(r);
    }
    return ledger;
}

}  // namespace mcsim
