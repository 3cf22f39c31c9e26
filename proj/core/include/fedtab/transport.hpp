#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedtab/errors.hpp"

namespace fedtab {

using SessionTag = std::uint64_t;

// Communication step categories, used for per-primitive traffic accounting.
enum class RoundKind : std::uint8_t {
    ShareDist,     // distributing fresh input shares
    Reconstruct,   // revealing a shared value to one party or all
    MulReveal,     // Beaver multiplication (e, f) opening
    TruncReveal,   // wrap-count reveal of z + r to P_1
    PermSigma,     // broadcast of the composed public permutation
    PermReveal,    // masked-vector reveal to the permutation owner
    BoolReveal,    // Boolean-domain Beaver AND opening
    Control,       // row-count checksums and similar plumbing
};

const char* round_kind_name(RoundKind k);

// Wire frame. On the simulated wire this is
//   sender(u8) | session(8B LE) | round(u32 LE) | len(u32 LE) | len x u64 LE
struct Frame {
    std::uint8_t sender = 0;
    SessionTag session = 0;
    std::uint32_t round = 0;
    std::vector<std::uint64_t> payload;

    std::size_t wire_bytes() const { return 1 + 8 + 4 + 4 + 8 * payload.size(); }
    std::vector<std::uint8_t> serialize() const;
};

struct TrafficCounter {
    std::uint64_t rounds = 0;
    std::uint64_t frames = 0;
    std::uint64_t bytes = 0;

    void operator+=(const TrafficCounter& o) {
        rounds += o.rounds;
        frames += o.frames;
        bytes += o.bytes;
    }
};

struct TrafficStats {
    TrafficCounter total;
    std::map<std::string, TrafficCounter> per_op;   // keyed by RoundKind name
    std::map<int, TrafficCounter> per_party;        // keyed by sender id

    double modeled_seconds(double latency_s, double bandwidth_bit_per_s) const {
        return static_cast<double>(total.rounds) * latency_s +
               static_cast<double>(total.bytes) * 8.0 / bandwidth_bit_per_s;
    }
};

enum class SchedulerMode {
    Free,        // party threads run concurrently (default FIFO mailbox delivery)
    RoundRobin,  // cooperative token: one party progresses at a time
};

// In-process message fabric for one protocol run. Mailboxes are keyed by
// (receiver, sender, session, round); delivery within a session is in send
// order because rounds are monotone. recv blocks until the matching frame
// arrives; if every registered party blocks at once the run is deadlocked
// and all waiters throw.
class SimNetwork {
  public:
    explicit SimNetwork(int parties, SchedulerMode mode = SchedulerMode::Free);

    int parties() const { return n_; }
    SchedulerMode mode() const { return mode_; }

    // Party threads announce themselves so deadlock detection knows how many
    // peers can still make progress.
    void register_party(int id);
    void unregister_party(int id);

    void send(int to, const Frame& f, RoundKind kind);
    void broadcast(int from, const Frame& f, RoundKind kind);
    Frame recv(int me, int from, SessionTag session, std::uint32_t round);

    // Counts one protocol round for (session, round) pairs not seen before.
    // Called implicitly from send(); exposed for rounds with no traffic.
    void note_round(SessionTag session, std::uint32_t round, RoundKind kind, int sender);

    TrafficStats stats() const;
    void reset_stats();

    void enable_audit(bool on) { audit_enabled_ = on; }
    bool audit_enabled() const { return audit_enabled_; }
    // (receiver, frame) log in receiver-then-send order; audit mode only.
    struct AuditRecord {
        int receiver;
        Frame frame;
    };
    const std::vector<AuditRecord>& audit_log() const { return audit_log_; }

    // Cooperative scheduler hooks (no-ops in Free mode).
    void yield_turn(int me);
    void acquire_turn(int me);

  private:
    struct Key {
        int receiver;
        int sender;
        SessionTag session;
        std::uint32_t round;
        bool operator<(const Key& o) const {
            if (receiver != o.receiver) return receiver < o.receiver;
            if (sender != o.sender) return sender < o.sender;
            if (session != o.session) return session < o.session;
            return round < o.round;
        }
    };

    void deliver_locked(int to, const Frame& f, RoundKind kind);
    void check_deadlock_locked();
    void pass_token_locked(int me);

    int n_;
    SchedulerMode mode_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::map<Key, Frame> boxes_;

    // round accounting: per session, the highest round index counted so far
    std::unordered_map<SessionTag, std::uint32_t> session_rounds_;
    std::unordered_map<SessionTag, std::map<int, std::uint32_t>> session_party_rounds_;
    TrafficStats stats_;

    int registered_ = 0;
    bool poisoned_ = false;
    std::map<int, Key> waiting_;  // party -> the key it is blocked on

    bool audit_enabled_ = false;
    std::vector<AuditRecord> audit_log_;

    // round-robin token
    int turn_ = 1;
    std::vector<bool> active_;
};

}  // namespace fedtab
