#pragma once

#include "auvsim/types.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace auvsim::acoustics {

enum class DropModel {
  HardCutoff,  // delivered iff d <= max_range
  Linear,      // delivered with probability clamp(1 - d / max_range, 0, 1)
};

struct ChannelParams {
  double sound_speed = 1500.0;  // m/s
  double max_range = 2000.0;    // m
  DropModel drop_model = DropModel::HardCutoff;
  std::size_t mtu = 32;         // bytes
  // Probability that a message arriving at a vehicle whose transponder has a
  // localization exchange in flight is lost. 0 disables the effect.
  double p_contention = 0.0;
  // Extra time a fix exchange keeps the requester's transponder busy beyond
  // the acoustic round trip.
  double fix_busy_time = 0.0;
  double sigma_range = 0.0;    // m, fix noise
  double sigma_azimuth = 0.0;  // rad, fix noise
  std::uint64_t seed = 0;
};

struct AcousticMessage {
  VehicleId sender = 0;
  std::vector<std::uint8_t> payload;
  double send_time = 0.0;
  Vec3 send_position = Vec3::Zero();
};

/// Relative position of a beacon as seen by the requester, global frame.
struct LocalizationFix {
  VehicleId beacon = 0;
  double range = 0.0;      // m
  double azimuth = 0.0;    // rad, CCW from east, (-pi, pi]
  double elevation = 0.0;  // rad
  double fix_time = 0.0;   // time the geometry refers to (request time)
  double ready_time = 0.0; // time the fix reaches the requester
};

struct Endpoint {
  VehicleId id = 0;
  Vec3 position = Vec3::Zero();
};

enum class EventKind {
  Send,
  Deliver,
  DropRange,
  DropContention,
  DropModem,
  FixRequest,
  FixDeliver,
  FixDrop,
};
const char* to_string(EventKind kind);

struct ChannelEvent {
  double time = 0.0;
  VehicleId sender = 0;
  VehicleId receiver = 0;
  EventKind kind = EventKind::Send;
  double distance = 0.0;
};

/// Shared acoustic medium. Propagation delay is distance / sound_speed with
/// the distance taken at send time. Simultaneous arrivals keep send order.
class AcousticChannel {
 public:
  explicit AcousticChannel(ChannelParams params = {});

  /// Schedules one delivery per receiver (the sender itself is skipped).
  /// Throws auvsim::Error when the payload exceeds the MTU.
  void transmit(const AcousticMessage& msg, std::span<const Endpoint> receivers);

  /// Resolves every arrival with time <= now: delivered messages move to the
  /// receiver's ready list, lost ones are logged. Call with non-decreasing `now`.
  void advance(double now);

  /// Messages for `receiver` with arrival time <= now, in arrival order.
  std::vector<AcousticMessage> poll(VehicleId receiver, double now);

  /// Starts a two-way ranging exchange; the fix arrives after 2 d / c.
  void request_fix(const Endpoint& requester, const Endpoint& beacon, double now);

  /// Fixes for `requester` that are ready at `now`, oldest first.
  /// A fix reaching a requester whose modem is down is lost.
  std::vector<LocalizationFix> poll_fixes(VehicleId requester, double now);

  /// A disabled modem neither sends nor receives (messages or fixes).
  void set_modem_enabled(VehicleId id, bool enabled);
  bool modem_enabled(VehicleId id) const { return disabled_.count(id) == 0; }

  const ChannelParams& params() const { return params_; }
  const std::vector<ChannelEvent>& events() const { return events_; }
  std::size_t pending() const;
  std::size_t pending_fixes() const;

  /// CSV: time,sender,receiver,event,distance
  void write_event_csv(std::ostream& out) const;

 private:
  struct Pending {
    double arrival;
    std::uint64_t seq;
    VehicleId receiver;
    double distance;
    AcousticMessage msg;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const {
      return a.arrival != b.arrival ? a.arrival > b.arrival : a.seq > b.seq;
    }
  };
  struct PendingFix {
    LocalizationFix fix;
    std::uint64_t seq;
  };
  struct Window {
    double begin, end;
  };

  bool admits(double distance);
  bool busy(VehicleId id, double t) const;
  void log(double time, VehicleId sender, VehicleId receiver, EventKind kind, double distance);

  ChannelParams params_;
  std::mt19937_64 rng_;
  std::uint64_t next_seq_ = 0;
  std::map<VehicleId, std::priority_queue<Pending, std::vector<Pending>, Later>> inbox_;
  std::map<VehicleId, std::deque<PendingFix>> fixes_;
  std::map<VehicleId, std::vector<AcousticMessage>> ready_;
  std::map<VehicleId, std::vector<LocalizationFix>> ready_fixes_;
  std::map<VehicleId, std::deque<Window>> busy_;
  std::set<VehicleId> disabled_;
  std::vector<ChannelEvent> events_;
};

}  // namespace auvsim::acoustics
