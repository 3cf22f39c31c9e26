#include <doctest.h>

#include "fedtab/multiparty.hpp"
#include "fedtab/transport.hpp"

using namespace fedtab;

TEST_CASE("frame wire size matches the header layout") {
    Frame f{1, 0xdeadbeef, 3, {1, 2, 3}};
    CHECK(f.wire_bytes() == 1 + 8 + 4 + 4 + 24);
    CHECK(f.serialize().size() == f.wire_bytes());
}

TEST_CASE("broadcast reaches n-1 parties and counts their bytes") {
    SimNetwork net(4);
    for (int id = 1; id <= 4; ++id) net.register_party(id);
    Frame f{1, 42, 0, {7, 8}};
    net.broadcast(1, f, RoundKind::Reconstruct);
    for (int to = 2; to <= 4; ++to) {
        Frame g = net.recv(to, 1, 42, 0);
        CHECK(g.payload == std::vector<std::uint64_t>{7, 8});
    }
    auto s = net.stats();
    CHECK(s.total.frames == 3);
    CHECK(s.total.bytes == 3 * f.wire_bytes());
    CHECK(s.total.rounds == 1);
    CHECK(s.per_party.at(1).frames == 3);
}

TEST_CASE("delivery within a session follows round order") {
    SimNetwork net(2);
    for (int id = 1; id <= 2; ++id) net.register_party(id);
    net.send(2, Frame{1, 9, 0, {10}}, RoundKind::ShareDist);
    net.send(2, Frame{1, 9, 1, {11}}, RoundKind::ShareDist);
    CHECK(net.recv(2, 1, 9, 0).payload[0] == 10);
    CHECK(net.recv(2, 1, 9, 1).payload[0] == 11);
}

TEST_CASE("unknown endpoint raises a configuration error") {
    SimNetwork net(2);
    CHECK_THROWS_AS(net.send(5, Frame{1, 1, 0, {}}, RoundKind::Control), ConfigError);
}

TEST_CASE("all parties blocked in recv is detected as a deadlock") {
    SimNetwork net(2);
    CHECK_THROWS_AS(run_parties(net,
                                [&](int id) {
                                    // both sides wait for a frame nobody sends
                                    net.recv(id, 3 - id, 1, 0);
                                    return 0;
                                }),
                    ProtocolError);
}

TEST_CASE("stats are identical across identical runs") {
    auto run_once = [] {
        SimNetwork net(3);
        auto out = run_parties(net, [&](int id) {
            Frame f{static_cast<std::uint8_t>(id), 77, 0,
                    {static_cast<std::uint64_t>(id) * 3}};
            net.broadcast(id, f, RoundKind::Reconstruct);
            std::uint64_t acc = 0;
            for (int from = 1; from <= 3; ++from) {
                if (from == id) continue;
                acc += net.recv(id, from, 77, 0).payload[0];
            }
            return acc;
        });
        return std::make_pair(out, net.stats());
    };
    auto [r1, s1] = run_once();
    auto [r2, s2] = run_once();
    CHECK(r1 == r2);
    CHECK(s1.total.rounds == s2.total.rounds);
    CHECK(s1.total.frames == s2.total.frames);
    CHECK(s1.total.bytes == s2.total.bytes);
}

TEST_CASE("modeled time combines latency rounds and bandwidth bytes") {
    TrafficStats s;
    s.total.rounds = 100;
    s.total.bytes = 1'000'000;
    // 100 * 5ms + 8Mbit / 100Mbps = 0.5 + 0.08
    CHECK(s.modeled_seconds(0.005, 100e6) == doctest::Approx(0.58));
}

TEST_CASE("audit log records receiver and payload") {
    SimNetwork net(2);
    net.enable_audit(true);
    for (int id = 1; id <= 2; ++id) net.register_party(id);
    net.send(2, Frame{1, 5, 0, {123}}, RoundKind::ShareDist);
    (void)net.recv(2, 1, 5, 0);
    REQUIRE(net.audit_log().size() == 1);
    CHECK(net.audit_log()[0].receiver == 2);
    CHECK(net.audit_log()[0].frame.payload[0] == 123);
}
