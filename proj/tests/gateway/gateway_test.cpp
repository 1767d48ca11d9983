#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "live_rig.hpp"
#include "wire_client.hpp"

using namespace plcsim;
using namespace std::chrono_literals;
using test::LiveRig;
using test::WireClient;

namespace {

template <typename T>
std::optional<T> next_of(WireClient& c, std::chrono::milliseconds timeout) {
  const auto until = test::Clock::now() + timeout;
  while (test::Clock::now() < until) {
    const auto m = c.receive(std::chrono::duration_cast<std::chrono::milliseconds>(until - test::Clock::now()));
    if (!m) return std::nullopt;
    if (const auto* t = std::get_if<T>(&*m)) return *t;
  }
  return std::nullopt;
}

std::optional<wire::StatusMessage> status_where(WireClient& c, modes::MachineState state,
                                                std::chrono::milliseconds timeout) {
  const auto until = test::Clock::now() + timeout;
  while (test::Clock::now() < until) {
    const auto s = next_of<wire::StatusMessage>(
        c, std::chrono::duration_cast<std::chrono::milliseconds>(until - test::Clock::now()));
    if (!s) return std::nullopt;
    if (s->machine_state == state) return s;
  }
  return std::nullopt;
}

}  // namespace

TEST_SUITE("gateway") {
  TEST_CASE("endpoint parsing") {
    const auto a = gateway::parse_endpoint("0.0.0.0:8080");
    CHECK(a.host == "0.0.0.0");
    CHECK(a.port == 8080);
    const auto b = gateway::parse_endpoint(":9000");
    CHECK(b.host == "127.0.0.1");
    CHECK(b.port == 9000);
    CHECK(gateway::parse_endpoint("9001").port == 9001);
    CHECK_THROWS_AS(gateway::parse_endpoint("host:abc"), std::invalid_argument);
    CHECK_THROWS_AS(gateway::parse_endpoint("70000"), std::invalid_argument);
    CHECK_THROWS_AS(gateway::parse_endpoint("host:"), std::invalid_argument);
  }

  TEST_CASE("a new client is greeted with status then errors") {
    LiveRig rig;
    rig.start();
    WireClient c(rig.port());
    const auto first = c.receive(2s);
    REQUIRE(first.has_value());
    CHECK(std::holds_alternative<wire::StatusMessage>(*first));
    const auto second = c.receive(2s);
    REQUIRE(second.has_value());
    CHECK(std::holds_alternative<wire::ErrorsMessage>(*second));
    CHECK(std::get<wire::StatusMessage>(*first).modules.size() == 13);
    CHECK(rig.clients() == 1);
  }

  TEST_CASE("emergency stop over the wire aborts the machine") {
    LiveRig rig;
    rig.start();
    WireClient c(rig.port());
    REQUIRE(next_of<wire::StatusMessage>(c, 2s));
    c.send(1, cmd::EStop{});
    const auto ack = c.ack_for(1, 2s);
    REQUIRE(ack.has_value());
    CHECK(ack->accepted);
    bool aborting = false;
    bool seen = false;
    const auto until = test::Clock::now() + 3s;
    while (test::Clock::now() < until && !(aborting && seen)) {
      const auto m = c.receive(1s);
      if (!m) break;
      if (const auto* s = std::get_if<wire::StatusMessage>(&*m)) aborting |= s->machine_state == modes::MachineState::ABORTING;
      if (const auto* e = std::get_if<wire::ErrorsMessage>(&*m)) {
        for (const auto& r : e->records) seen |= r.event.number == errors::numbers::kEmergencyStop;
      }
    }
    CHECK(aborting);
    CHECK(seen);
  }

  TEST_CASE("monostable retract is rejected with a reason") {
    LiveRig rig;
    rig.start();
    WireClient c(rig.port());
    REQUIRE(next_of<wire::StatusMessage>(c, 2s));
    c.send(1, cmd::ModeSwitch{modes::OperatingMode::Manual});
    REQUIRE(c.ack_for(1, 2s).value().accepted);
    c.send(2, cmd::ManualOutput{ModulePath::parse("xPPU/Crane/Lift"), "DO_Retract", true});
    const auto lift = c.ack_for(2, 2s);
    REQUIRE(lift.has_value());
    CHECK_FALSE(lift->accepted);
    REQUIRE(lift->reason.has_value());
    CHECK(lift->reason->find("signal absent in variant") != std::string::npos);
    c.send(3, cmd::ManualOutput{ModulePath::parse("xPPU/Stack/Pusher"), "DO_Retract", true});
    CHECK(c.ack_for(3, 2s).value().accepted);
  }

  TEST_CASE("scenario-only commands are refused on the wire") {
    LiveRig rig;
    rig.start();
    WireClient c(rig.port());
    plant::FaultSpec f;
    f.id = "x";
    f.kind = plant::FaultKind::MotorJam;
    f.target = ModulePath::parse("xPPU/Crane/Base");
    c.send(4, cmd::InjectFault{f});
    const auto inject = c.ack_for(4, 2s);
    REQUIRE(inject.has_value());
    CHECK_FALSE(inject->accepted);
    CHECK(inject->reason == "not allowed on the wire: InjectFault");
    c.send(5, cmd::ClearFault{"x"});
    const auto clear = c.ack_for(5, 2s);
    REQUIRE(clear.has_value());
    CHECK_FALSE(clear->accepted);
    CHECK(clear->reason == "not allowed on the wire: ClearFault");
  }

  TEST_CASE("protocol violations disconnect; bad command bodies do not") {
    LiveRig rig;
    rig.start();
    WireClient bad_body(rig.port());
    bad_body.send_raw(R"({"v":"v1","type":"Command","commandId":9,"command":{"kind":"Explode"}})");
    const auto ack = bad_body.ack_for(9, 2s);
    REQUIRE(ack.has_value());
    CHECK_FALSE(ack->accepted);
    CHECK(ack->reason.value().rfind("invalid command", 0) == 0);
    bad_body.send(10, cmd::Acknowledge{});
    CHECK(bad_body.ack_for(10, 2s).has_value());

    for (const std::string garbage : {std::string("hello"), std::string(R"({"v":"v2","type":"Command"})"),
                                      std::string(R"({"v":"v1","type":"Command","commandId":-1,"command":{}})")}) {
      CAPTURE(garbage);
      WireClient c(rig.port());
      c.send_raw(garbage);
      CHECK(c.wait_closed(3s));
    }
    CHECK_FALSE(bad_body.closed());
  }

  TEST_CASE("every command gets exactly one ack, only on its own connection") {
    LiveRig rig;
    rig.start();
    WireClient a(rig.port());
    WireClient b(rig.port());
    std::mt19937 rng(17);
    const std::vector<std::string> paths{"xPPU/Stack/Pusher", "xPPU/Crane/Base", "xPPU/Nowhere"};
    constexpr std::uint64_t kCount = 120;
    for (std::uint64_t id = 1; id <= kCount; ++id) {
      CommandBody body;
      switch (rng() % 5) {
        case 0: body = cmd::Acknowledge{}; break;
        case 1: body = cmd::State{modes::kAllCommands[rng() % modes::kAllCommands.size()]}; break;
        case 2: body = cmd::ModeSwitch{static_cast<modes::OperatingMode>(rng() % 3)}; break;
        case 3: body = cmd::Jog{ModulePath::parse(paths[rng() % paths.size()]), 1}; break;
        default: body = cmd::ClearFault{"none"}; break;
      }
      a.send(id, body);
    }
    std::map<std::uint64_t, int> acks;
    const auto until = test::Clock::now() + 5s;
    while (test::Clock::now() < until) {
      const auto m = a.receive(300ms);
      if (!m) {
        if (acks.size() == kCount) break;
        continue;
      }
      if (const auto* ack = std::get_if<wire::AckMessage>(&*m)) {
        ++acks[ack->command_id];
        if (!ack->accepted) CHECK(ack->reason.has_value());
      }
    }
    CHECK(acks.size() == kCount);
    for (const auto& [id, n] : acks) {
      CAPTURE(id);
      CHECK(n == 1);
    }
    int foreign = 0;
    const auto quiet = test::Clock::now() + 300ms;
    while (test::Clock::now() < quiet) {
      if (const auto m = b.receive(100ms)) foreign += std::holds_alternative<wire::AckMessage>(*m);
    }
    CHECK(foreign == 0);
  }

  TEST_CASE("errors reach the client within one tick") {
    const auto script = [](Runtime& rt, std::int64_t tick) {
      if (tick == 5) rt.enqueue(cmd::State{modes::StateCommand::Reset}, CommandSource::Scenario);
      if (tick == 25) rt.enqueue(cmd::State{modes::StateCommand::Start}, CommandSource::Scenario);
      if (tick == 60) {
        plant::FaultSpec f;
        f.id = "jam";
        f.kind = plant::FaultKind::MotorJam;
        f.target = ModulePath::parse("xPPU/Crane/Base");
        rt.enqueue(cmd::InjectFault{f}, CommandSource::Scenario);
      }
      if (tick == 150) rt.enqueue(cmd::EStop{}, CommandSource::Scenario);
    };
    LiveRig rig({}, {}, script);
    WireClient c(rig.port());
    rig.start();
    std::set<errors::RecordId> seen;
    std::int64_t worst_ticks = 0;
    auto worst_wall = test::Clock::duration::zero();
    const auto until = test::Clock::now() + 6s;
    while (test::Clock::now() < until && seen.size() < 2) {
      const auto m = c.receive(500ms);
      const auto now = test::Clock::now();
      if (!m) continue;
      const auto* e = std::get_if<wire::ErrorsMessage>(&*m);
      if (!e) continue;
      for (const auto& r : e->records) {
        if (!seen.insert(r.id).second) continue;
        worst_ticks = std::max(worst_ticks, e->tick - r.event.tick);
        const auto published = rig.published_at(r.event.tick);
        REQUIRE(published.has_value());
        worst_wall = std::max(worst_wall, now - *published);
      }
    }
    CHECK(seen.size() >= 2);
    CHECK(worst_ticks <= 1);
    CHECK(worst_wall <= rig.period());
  }

  TEST_CASE("browsers upgrade to WebSocket") {
    LiveRig rig;
    rig.start();
    WireClient c(rig.port(), WireClient::Transport::WebSocket);
    const auto first = c.receive(2s);
    REQUIRE(first.has_value());
    CHECK(std::holds_alternative<wire::StatusMessage>(*first));
    c.send(1, cmd::EStop{});
    CHECK(c.ack_for(1, 2s).value().accepted);
    c.send_raw(wire::encode(wire::WireCommand{2, cmd::Acknowledge{}}) + "\n" +
               wire::encode(wire::WireCommand{3, cmd::EStopRelease{}}));
    CHECK(c.ack_for(2, 2s).has_value());
    CHECK(c.ack_for(3, 2s).has_value());
    CHECK(status_where(c, modes::MachineState::ABORTED, 3s).has_value());
  }

  TEST_CASE("a client that stops reading is dropped without stalling the scan") {
    auto rt = build_runtime(plant::PlantConfig{});
    gateway::GatewayOptions opts;
    opts.status_every = 1;
    gateway::Gateway gw([&](CommandBody b, CommandSource s) { return rt->enqueue(std::move(b), s); }, opts);
    gw.start();
    WireClient slow(gw.port(), WireClient::Transport::Ndjson, 4096);
    gw.publish(rt->scan());
    const auto deadline = test::Clock::now() + 2s;
    while (gw.client_count() == 0 && test::Clock::now() < deadline) std::this_thread::sleep_for(10ms);
    std::this_thread::sleep_for(300ms);
    REQUIRE(gw.client_count() == 1);

    const auto t0 = test::Clock::now();
    for (int i = 0; i < 5000 && gw.client_count() > 0; ++i) {
      gw.publish(rt->scan());
      if (i % 64 == 0) std::this_thread::sleep_for(1ms);
    }
    const auto elapsed = test::Clock::now() - t0;
    const auto settle = test::Clock::now() + 3s;
    while (gw.client_count() > 0 && test::Clock::now() < settle) std::this_thread::sleep_for(10ms);
    CHECK(gw.client_count() == 0);
    CHECK(slow.wait_closed(10s));
    CHECK(elapsed < 20s);

    WireClient fresh(gw.port());
    gw.publish(rt->scan());
    CHECK(next_of<wire::StatusMessage>(fresh, 2s).has_value());
    gw.stop();
  }
}
