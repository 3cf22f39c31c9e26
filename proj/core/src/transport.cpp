#include "fedtab/transport.hpp"

#include <algorithm>

namespace fedtab {

const char* round_kind_name(RoundKind k) {
    switch (k) {
        case RoundKind::ShareDist: return "share_dist";
        case RoundKind::Reconstruct: return "reconstruct";
        case RoundKind::MulReveal: return "mul";
        case RoundKind::TruncReveal: return "trunc";
        case RoundKind::PermSigma: return "perm_sigma";
        case RoundKind::PermReveal: return "perm_reveal";
        case RoundKind::BoolReveal: return "bool_and";
        case RoundKind::Control: return "control";
    }
    return "unknown";
}

std::vector<std::uint8_t> Frame::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(wire_bytes());
    out.push_back(sender);
    auto put = [&out](std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    put(session, 8);
    put(round, 4);
    put(static_cast<std::uint32_t>(payload.size()), 4);
    for (std::uint64_t w : payload) put(w, 8);
    return out;
}

SimNetwork::SimNetwork(int parties, SchedulerMode mode)
    : n_(parties), mode_(mode), active_(static_cast<std::size_t>(parties) + 1, false) {
    if (parties < 2) throw ConfigError("SimNetwork needs at least 2 parties");
}

void SimNetwork::register_party(int id) {
    std::lock_guard<std::mutex> lk(mu_);
    if (id < 1 || id > n_) throw ConfigError("party id out of range");
    if (!active_[static_cast<std::size_t>(id)]) {
        active_[static_cast<std::size_t>(id)] = true;
        ++registered_;
    }
}

void SimNetwork::unregister_party(int id) {
    std::lock_guard<std::mutex> lk(mu_);
    if (active_[static_cast<std::size_t>(id)]) {
        active_[static_cast<std::size_t>(id)] = false;
        --registered_;
        if (mode_ == SchedulerMode::RoundRobin && turn_ == id) {
            for (int step = 1; step <= n_; ++step) {
                int cand = (id - 1 + step) % n_ + 1;
                if (active_[static_cast<std::size_t>(cand)]) {
                    turn_ = cand;
                    break;
                }
            }
        }
        check_deadlock_locked();  // the remaining waiters may now be stuck
    }
    cv_.notify_all();
}

void SimNetwork::note_round(SessionTag session, std::uint32_t round, RoundKind kind, int sender) {
    auto& counted = session_rounds_[session];
    if (round >= counted) {
        std::uint64_t delta = round + 1 - counted;
        counted = round + 1;
        stats_.total.rounds += delta;
        stats_.per_op[round_kind_name(kind)].rounds += delta;
    }
    auto& pr = session_party_rounds_[session][sender];
    if (round >= pr) {
        stats_.per_party[sender].rounds += round + 1 - pr;
        pr = round + 1;
    }
}

void SimNetwork::deliver_locked(int to, const Frame& f, RoundKind kind) {
    note_round(f.session, f.round, kind, f.sender);
    const std::uint64_t bytes = f.wire_bytes();
    stats_.total.frames += 1;
    stats_.total.bytes += bytes;
    auto& op = stats_.per_op[round_kind_name(kind)];
    op.frames += 1;
    op.bytes += bytes;
    auto& pp = stats_.per_party[f.sender];
    pp.frames += 1;
    pp.bytes += bytes;

    if (audit_enabled_) audit_log_.push_back({to, f});

    Key k{to, f.sender, f.session, f.round};
    auto [it, inserted] = boxes_.emplace(k, f);
    (void)it;
    if (!inserted) throw ProtocolError("duplicate frame for (sender, session, round)");
}

void SimNetwork::send(int to, const Frame& f, RoundKind kind) {
    std::unique_lock<std::mutex> lk(mu_);
    if (to < 1 || to > n_) throw ConfigError("send: unknown endpoint");
    if (mode_ == SchedulerMode::RoundRobin) {
        cv_.wait(lk, [&] { return poisoned_ || turn_ == f.sender; });
        if (poisoned_) throw ProtocolError("deadlock: all parties blocked in recv");
    }
    deliver_locked(to, f, kind);
    cv_.notify_all();
}

void SimNetwork::broadcast(int from, const Frame& f, RoundKind kind) {
    std::unique_lock<std::mutex> lk(mu_);
    if (mode_ == SchedulerMode::RoundRobin) {
        cv_.wait(lk, [&] { return poisoned_ || turn_ == from; });
        if (poisoned_) throw ProtocolError("deadlock: all parties blocked in recv");
    }
    for (int to = 1; to <= n_; ++to) {
        if (to == from) continue;
        deliver_locked(to, f, kind);
    }
    cv_.notify_all();
}

void SimNetwork::check_deadlock_locked() {
    // a true deadlock: every registered party waits on a frame that is not in
    // flight (waiters whose frame already arrived just have not woken yet)
    if (registered_ == 0 || static_cast<int>(waiting_.size()) < registered_) return;
    for (const auto& [party, key] : waiting_) {
        if (boxes_.find(key) != boxes_.end()) return;
    }
    poisoned_ = true;
    cv_.notify_all();
}

Frame SimNetwork::recv(int me, int from, SessionTag session, std::uint32_t round) {
    std::unique_lock<std::mutex> lk(mu_);
    Key k{me, from, session, round};
    bool registered_wait = false;
    while (true) {
        auto it = boxes_.find(k);
        if (it != boxes_.end()) {
            if (registered_wait) waiting_.erase(me);
            Frame f = std::move(it->second);
            boxes_.erase(it);
            return f;
        }
        if (poisoned_) {
            if (registered_wait) waiting_.erase(me);
            throw ProtocolError("deadlock: all parties blocked in recv");
        }
        // never sleep holding the scheduler token
        if (mode_ == SchedulerMode::RoundRobin && turn_ == me) pass_token_locked(me);
        waiting_.insert_or_assign(me, k);
        registered_wait = true;
        check_deadlock_locked();
        cv_.wait(lk, [&] {
            return poisoned_ || boxes_.find(k) != boxes_.end() ||
                   (mode_ == SchedulerMode::RoundRobin && turn_ == me);
        });
    }
}

void SimNetwork::pass_token_locked(int me) {
    for (int step = 1; step <= n_; ++step) {
        int cand = (me - 1 + step) % n_ + 1;
        if (cand != me && active_[static_cast<std::size_t>(cand)]) {
            turn_ = cand;
            cv_.notify_all();
            return;
        }
    }
}

void SimNetwork::yield_turn(int me) {
    if (mode_ != SchedulerMode::RoundRobin) return;
    std::lock_guard<std::mutex> lk(mu_);
    if (turn_ == me) {
        for (int step = 1; step <= n_; ++step) {
            int cand = (me - 1 + step) % n_ + 1;
            if (active_[static_cast<std::size_t>(cand)] && cand != me) {
                turn_ = cand;
                break;
            }
        }
        cv_.notify_all();
    }
}

void SimNetwork::acquire_turn(int me) {
    if (mode_ != SchedulerMode::RoundRobin) return;
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] { return poisoned_ || turn_ == me; });
    if (poisoned_) throw ProtocolError("deadlock: all parties blocked in recv");
}

TrafficStats SimNetwork::stats() const {
    std::lock_guard<std::mutex> lk(mu_);
    return stats_;
}

void SimNetwork::reset_stats() {
    std::lock_guard<std::mutex> lk(mu_);
    stats_ = TrafficStats{};
    session_rounds_.clear();
    session_party_rounds_.clear();
}

}  // namespace fedtab
