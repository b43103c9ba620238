#ifndef PULSEWAVE_ENGINE_HPP
#define PULSEWAVE_ENGINE_HPP

#include <deque>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "pulsewave/capture.hpp"
#include "pulsewave/config.hpp"
#include "pulsewave/packet.hpp"
#include "pulsewave/schedule.hpp"
#include "pulsewave/time.hpp"
#include "pulsewave/topology.hpp"
#include "pulsewave/traffic.hpp"

namespace pulsewave {

// Deterministic discrete-event core: a single (time, seq)-ordered queue,
// point-to-point links with exclusive per-direction serialization plus
// propagation delay, drop-tail FIFO queues, and store-and-forward routing.
// Strictly single-threaded during a run.

struct Event {
    enum class Kind : std::uint8_t {
        AppSend,
        Retarget,
        WindowEnd,
        BenignTick,
        TxComplete,
        Deliver,
        SimEnd,
    };
    SimTime t = 0;
    std::uint64_t seq = 0;
    Kind kind = Kind::SimEnd;
    std::int32_t a = 0;      // app / vector / client / linkdir index
    std::int32_t b = 0;      // target index / server index
    std::uint64_t gen = 0;   // send-chain generation
    std::uint32_t size = 0;  // packet size or source port
    PacketPtr pkt;           // Deliver only
};

// One direction of a point-to-point link.
struct LinkDir {
    int link_id = -1;
    int from_node = -1;
    int to_node = -1;
    double rate_bps = 0.0;
    SimTime delay = 0;
    std::size_t capacity = 0;

    SimTime busy_until = 0;
    bool tx_pending = false;  // a TxComplete event is outstanding
    std::deque<PacketPtr> queue;

    std::uint64_t tx = 0;
    std::uint64_t rx = 0;
    std::uint64_t drop = 0;
    CapturePoint* capture = nullptr;
};

// Link and forwarding mechanics, separate from the traffic layer so the
// transmission rules can be exercised directly.
class SimCore {
public:
    SimCore(const Topology& topo, SimTime duration);

    void attach_captures(std::vector<std::unique_ptr<CapturePoint>>& points);

    // Queues a packet on a link direction at time t: starts serialization
    // if the transmitter is free, queues while there is room, drops
    // otherwise. Delivery lands at t_start + size*8/rate + delay.
    void transmit(int dir_index, const PacketPtr& pkt, SimTime t);

    // Local delivery when the node owns pkt->dst_addr, otherwise the next
    // transmit per the routing table.
    void forward(int node, const PacketPtr& pkt, SimTime t);

    void schedule(SimTime t, Event ev);

    // Pops the next event and advances the clock. Returns false once the
    // queue is exhausted or the horizon is reached. TxComplete and Deliver
    // are handled internally; other kinds are returned to the caller.
    bool next_event(Event& out);

    int dir_index(int link_id, int from_node) const;
    int uplink_dir(int host_node) const;
    const LinkDir& dir(int index) const {
        return dirs_[static_cast<std::size_t>(index)];
    }
    std::size_t dir_count() const { return dirs_.size(); }
    SimTime now() const { return now_; }

    std::uint64_t delivered = 0;
    std::uint64_t events_executed = 0;

    // Invoked on local delivery (traffic layer hooks the server side here).
    std::function<void(int node, const PacketPtr&, SimTime)> on_local_delivery;

private:
    void start_transmission(LinkDir& d, const PacketPtr& pkt, SimTime t);
    void handle_tx_complete(int dir_idx, SimTime t);

    const Topology& topo_;
    SimTime duration_;
    SimTime now_ = 0;
    std::vector<LinkDir> dirs_;
    std::unordered_map<std::uint32_t, int> addr_to_node_;
    std::uint64_t next_seq_ = 0;

    struct EventCompare {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) return a.t > b.t;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, EventCompare> queue_;
};

// Full scenario run: builds topology and timetable from cfg, instantiates
// attacker and benign applications, opens capture files under out_dir
// (no captures when out_dir is empty), simulates [0, duration), closes and
// flushes everything, and writes the run log.
class Engine {
public:
    explicit Engine(ScenarioConfig cfg);

    RunReport run(const std::string& out_dir);

    const Topology& topology() const { return topo_; }
    const Timetable& timetable() const { return timetable_; }
    const ScenarioConfig& config() const { return cfg_; }

private:
    ScenarioConfig cfg_;
    Topology topo_;
    Timetable timetable_;
};

}  // namespace pulsewave

#endif
