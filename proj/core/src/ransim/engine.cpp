#include "ranharness/ransim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ranharness/common/fnv.hpp"
#include "ranharness/common/format.hpp"
#include "ranharness/config/seed.hpp"
#include "ranharness/ransim/channel.hpp"
#include "ranharness/ransim/rrc.hpp"

namespace ranharness::ransim {

std::string to_string(UeEventKind k) {
  switch (k) {
    case UeEventKind::connected: return "connected";
    case UeEventKind::blocked: return "blocked";
    case UeEventKind::released: return "released";
    case UeEventKind::dropped: return "dropped";
  }
  return "unknown";
}

struct SimEngine::Ue {
  std::string name;
  double position_m = 0;
  double tx_dbm = 20;
  std::uint64_t attach_slot = 0;
  RadioLinkMonitor rlf;
  Rng rng;
  RrcSetupRequest identity;
  UeState state = UeState::idle;
  std::uint16_t rnti = 0;
  std::uint64_t msg3_slot = 0;
  std::uint32_t attempts = 0;

  Ue(const config::ComponentSpec& spec, std::uint64_t seed)
      : name(spec.name),
        position_m(spec.position_m.value_or(0.0)),
        tx_dbm(spec.has_param("tx_power_dbm") ? spec.number_param("tx_power_dbm") : 20.0),
        attach_slot(spec.has_param("attach_slot")
                        ? static_cast<std::uint64_t>(spec.int_param("attach_slot"))
                        : 0),
        rlf(spec.has_param("rlf_threshold_db") ? spec.number_param("rlf_threshold_db") : -5.0,
            spec.has_param("rlf_slots") ? static_cast<std::uint32_t>(spec.int_param("rlf_slots"))
                                        : 10),
        rng(seed) {
    identity.ue_identity = rng.below(kMaxIdentity + 1);
    identity.establishment_cause = static_cast<std::uint8_t>(rng.below(8));
  }

  UeView view() const { return {name, position_m, state, rnti, attempts}; }
};

namespace {

// Minimal single-line JSON object builder for trace records. Keys and
// string values are plain identifiers, so only quotes and backslashes are
// escaped.
class Line {
 public:
  explicit Line(std::uint64_t slot, std::string_view ev) {
    text_ = "{\"slot\":" + std::to_string(slot) + ",\"ev\":\"";
    text_ += ev;
    text_ += '"';
  }
  Line& str(std::string_view k, std::string_view v) {
    key(k);
    text_ += '"';
    for (char c : v) {
      if (c == '"' || c == '\\') text_ += '\\';
      text_ += c;
    }
    text_ += '"';
    return *this;
  }
  Line& num(std::string_view k, std::uint64_t v) {
    key(k);
    text_ += std::to_string(v);
    return *this;
  }
  Line& real(std::string_view k, double v) {
    key(k);
    text_ += format_double(v);
    return *this;
  }
  Line& flag(std::string_view k, bool v) {
    key(k);
    text_ += v ? "true" : "false";
    return *this;
  }
  std::string done() { return text_ + "}\n"; }

 private:
  void key(std::string_view k) {
    text_ += ",\"";
    text_ += k;
    text_ += "\":";
  }
  std::string text_;
};

metrics::MetricPoint point(std::string measurement, std::uint64_t slot, metrics::Fields fields,
                           metrics::Tags tags = {}) {
  return {std::move(measurement), std::move(tags), std::move(fields), slot};
}

}  // namespace

SimEngine::SimEngine(config::ChannelSpec channel, std::uint64_t seed)
    : channel_(channel), seed_(seed), digest_(Fnv1a64{}.value()) {}

SimEngine::~SimEngine() = default;

void SimEngine::add_gnb(const config::ComponentSpec& spec) {
  if (gnb_) throw std::logic_error("simulation already has a gnb");
  gnb_spec_ = spec;
  gnb_ = std::make_unique<GnbState>(spec.name, GnbParams::from_spec(spec));
  gnb_rng_ = std::make_unique<Rng>(config::derive_component_seed(seed_, spec.name));
}

void SimEngine::restart_gnb(std::uint64_t seed) {
  if (!gnb_spec_) throw std::logic_error("simulation has no gnb");
  gnb_ = std::make_unique<GnbState>(gnb_spec_->name, GnbParams::from_spec(*gnb_spec_));
  gnb_rng_ = std::make_unique<Rng>(seed);
}

void SimEngine::add_ue(const config::ComponentSpec& spec) {
  for (const auto& u : ues_)
    if (u->name == spec.name) throw std::logic_error("duplicate ue " + spec.name);
  ues_.push_back(std::make_unique<Ue>(spec, config::derive_component_seed(seed_, spec.name)));
}

void SimEngine::remove_ue(const std::string& name) {
  auto it = std::find_if(ues_.begin(), ues_.end(), [&](const auto& u) { return u->name == name; });
  if (it == ues_.end()) return;
  if ((*it)->state == UeState::connected && gnb_) gnb_->release((*it)->rnti);
  ues_.erase(it);
}

void SimEngine::attach(const std::string& name, std::size_t order, SlotParticipant* participant) {
  detach(name);
  auto pos = std::find_if(participants_.begin(), participants_.end(),
                          [&](const Participant& p) { return p.order > order; });
  participants_.insert(pos, Participant{name, order, participant});
}

void SimEngine::detach(const std::string& name) {
  std::erase_if(participants_, [&](const Participant& p) { return p.name == name; });
}

void SimEngine::set_writer(const std::string& component, metrics::PointWriter* writer) {
  if (writer)
    writers_[component] = writer;
  else
    writers_.erase(component);
}

std::vector<UeView> SimEngine::ues() const {
  std::vector<UeView> out;
  for (const auto& u : ues_) out.push_back(u->view());
  return out;
}

std::optional<UeView> SimEngine::ue(const std::string& name) const {
  for (const auto& u : ues_)
    if (u->name == name) return u->view();
  return std::nullopt;
}

void SimEngine::fail_gnb(const std::string& reason) {
  if (gnb_ && !gnb_->failed()) deferred_failure_ = reason;
}

void SimEngine::run_participants(std::uint64_t slot, const SlotEvents* previous,
                                 std::vector<IssuedCommand>& out, bool final) {
  // Copy: a participant is never attached or detached from inside on_slot,
  // but the list must not be iterated while the caller could mutate it.
  const auto list = participants_;
  for (const auto& p : list) {
    CommandSink sink(p.name, out);
    SlotContext ctx{slot, previous, *this, sink, final};
    p.participant->on_slot(ctx);
  }
}

void SimEngine::drop_connections(SlotEvents& ev, const std::vector<std::string>& dropped) {
  for (auto& u : ues_) {
    const bool was_connected = std::find(dropped.begin(), dropped.end(), u->name) != dropped.end();
    if (was_connected) ev.ue_events.push_back({UeEventKind::dropped, u->name, u->rnti});
    if (u->state == UeState::connected || u->state == UeState::granted) {
      u->state = UeState::idle;
      u->rnti = 0;
    }
  }
}

const SlotEvents& SimEngine::step() {
  const std::uint64_t t = slot_;
  std::vector<IssuedCommand> commands;
  run_participants(t, has_last_ ? &last_ : nullptr, commands, false);

  SlotEvents ev;
  ev.slot = t;

  // (1) apply commands
  std::vector<RachPreamble> preambles;
  std::vector<IssuedCommand> rrc;
  for (auto& c : commands) {
    if (auto* tx = std::get_if<TransmitCommand>(&c.command)) {
      ev.transmissions.push_back({c.source, tx->tx_dbm, tx->position_m, true});
    } else if (auto* pre = std::get_if<PreambleCommand>(&c.command)) {
      std::string source = pre->tag.empty() ? c.source : c.source + "/" + pre->tag;
      preambles.push_back({t, pre->index, std::move(source)});
    } else {
      rrc.push_back(std::move(c));
    }
  }

  if (deferred_failure_ && gnb_ && !gnb_->failed()) {
    ev.gnb_failure = *deferred_failure_;
    drop_connections(ev, gnb_->fail(*deferred_failure_));
  }
  deferred_failure_.reset();

  const bool gnb_up = gnb_ && !gnb_->failed();

  // (2) RACH occasion
  if (gnb_up) {
    gnb_->expire(t);
    if (gnb_->is_occasion(t)) {
      ev.rach_occasion = true;
      for (auto& u : ues_) {
        if (u->state != UeState::idle || t < u->attach_slot) continue;
        ++u->attempts;
        preambles.push_back({t, static_cast<std::uint32_t>(u->rng.below(kPreambleCount)), u->name});
      }
      ev.rach = gnb_->rach_occasion(t, std::move(preambles));
      ev.rach_overflow = gnb_->last_overflow();
      for (const auto& o : ev.rach) {
        if (o.result != RachResult::granted) continue;
        for (auto& u : ues_) {
          if (u->name != o.source) continue;
          u->state = UeState::granted;
          u->rnti = o.rnti;
          u->msg3_slot = t + 1;
        }
      }
      if (gnb_->failed()) {
        ev.gnb_failure = *gnb_->failure();
        std::vector<std::string> dropped;
        for (const auto& u : ues_)
          if (u->state == UeState::connected) dropped.push_back(u->name);
        drop_connections(ev, dropped);
      }
    }
  }

  // (3) RRC delivery
  if (gnb_ && !gnb_->failed()) {
    for (auto& u : ues_) {
      if (u->state != UeState::granted || u->msg3_slot != t) continue;
      const auto sdu = encode_setup_request(u->identity);
      const bool ok = std::holds_alternative<RrcSetupRequest>(decode_setup_request(sdu));
      const AdmitResult admit =
          ok ? gnb_->complete_contention(u->rnti, u->name, t) : AdmitResult::unknown_rnti;
      if (admit == AdmitResult::connected) {
        u->state = UeState::connected;
        u->rlf.reset();
        ev.ue_events.push_back({UeEventKind::connected, u->name, u->rnti});
      } else {
        if (admit == AdmitResult::blocked)
          ev.ue_events.push_back({UeEventKind::blocked, u->name, u->rnti});
        u->state = UeState::idle;
        u->rnti = 0;
      }
    }
    for (const auto& c : rrc) {
      const auto& sdu = std::get<RrcCommand>(c.command).sdu;
      const auto result = decode_setup_request(sdu);
      RrcDelivery d{c.source, true, {}};
      if (auto* reject = std::get_if<RrcReject>(&result)) {
        d.accepted = false;
        d.reason = to_string(*reject);
      }
      ev.rrc.push_back(std::move(d));
    }
  } else {
    for (auto& u : ues_) {
      if (u->state == UeState::granted) {
        u->state = UeState::idle;
        u->rnti = 0;
      }
    }
  }

  // (4) PDCCH
  if (gnb_ && !gnb_->failed()) {
    const auto rntis = gnb_->active_rntis();
    ev.dci = schedule_pdcch(gnb_->params(), t, rntis, *gnb_rng_);
  }

  // (5) channel, SINR and radio-link monitoring
  std::vector<double> interference;
  for (const auto& tx : ev.transmissions)
    if (tx.interferer) interference.push_back(tx.tx_dbm - path_loss_db(std::abs(tx.position_m), channel_));
  std::optional<double> interference_dbm;
  if (!interference.empty()) {
    double sum = 0;
    for (double i : interference) sum += dbm_to_mw(i);
    interference_dbm = mw_to_dbm(sum);
  }
  for (auto& u : ues_) {
    if (u->state != UeState::connected) continue;
    const double rx = u->tx_dbm - path_loss_db(std::abs(u->position_m), channel_);
    const double sinr = sinr_db(rx, interference, channel_.noise_dbm);
    ev.links.push_back({u->name, u->rnti, rx, interference_dbm, sinr});
    ev.transmissions.push_back({u->name, u->tx_dbm, u->position_m, false});
    if (u->rlf.update(sinr)) {
      gnb_->release(u->rnti);
      ev.ue_events.push_back({UeEventKind::released, u->name, u->rnti});
      u->state = UeState::released;
      u->rnti = 0;
    }
  }

  // (6) metrics
  emit_metrics(ev);
  record(ev);
  last_ = std::move(ev);
  has_last_ = true;
  ++slot_;
  return last_;
}

void SimEngine::finish() {
  std::vector<IssuedCommand> discarded;
  run_participants(slot_, has_last_ ? &last_ : nullptr, discarded, true);
}

void SimEngine::write(const std::string& component, metrics::MetricPoint p) {
  auto it = writers_.find(component);
  if (it != writers_.end()) it->second->write(std::move(p));
}

void SimEngine::emit_metrics(const SlotEvents& ev) {
  if (writers_.empty()) return;
  const std::uint64_t t = ev.slot;
  for (const auto& o : ev.rach) {
    auto it = std::find_if(ues_.begin(), ues_.end(), [&](const auto& u) { return u->name == o.source; });
    if (it == ues_.end()) continue;
    write(o.source, point("rach_attempt", t,
                          {{"granted", o.result == RachResult::granted ? 1.0 : 0.0},
                           {"collision", o.result == RachResult::collision ? 1.0 : 0.0},
                           {"dropped", o.result == RachResult::dropped ? 1.0 : 0.0},
                           {"attempt", static_cast<double>((*it)->attempts)}},
                          {{"ue", o.source}}));
  }
  for (const auto& e : ev.ue_events) {
    const metrics::Tags tags{{"ue", e.ue}};
    switch (e.kind) {
      case UeEventKind::connected:
        write(e.ue, point("rrc_setup", t, {{"connected", 1.0}, {"rnti", double(e.rnti)}}, tags));
        break;
      case UeEventKind::blocked:
        write(e.ue, point("rrc_setup", t, {{"connected", 0.0}}, tags));
        if (gnb_) write(gnb_->name(), point("blocked", t, {{"count", 1.0}}, tags));
        break;
      case UeEventKind::released:
      case UeEventKind::dropped:
        write(e.ue, point("release", t,
                          {{"rnti", double(e.rnti)},
                           {"rlf", e.kind == UeEventKind::released ? 1.0 : 0.0}},
                          tags));
        break;
    }
  }
  for (const auto& l : ev.links) {
    metrics::Fields f{{"sinr_db", l.sinr_db}, {"rx_dbm", l.rx_dbm}};
    if (l.interference_dbm) f["interference_dbm"] = *l.interference_dbm;
    write(l.ue, point("sinr", t, std::move(f), {{"ue", l.ue}}));
  }
  for (const auto& u : ues_) {
    if (u->state != UeState::connected) continue;
    const bool got = std::any_of(ev.dci.begin(), ev.dci.end(),
                                 [&](const DciRecord& d) { return d.rnti == u->rnti; });
    write(u->name, point("dci_rx", t, {{"scheduled", 1.0}, {"received", got ? 1.0 : 0.0}},
                         {{"ue", u->name}}));
  }
  if (gnb_) {
    if (!gnb_->failed()) {
      write(gnb_->name(), point("gnb", t,
                                {{"connections", double(gnb_->connections().size())},
                                 {"pending", double(gnb_->pending().size())}}));
    }
    if (ev.rach_overflow > 0)
      write(gnb_->name(),
            point("contention_overflow", t, {{"dropped", double(ev.rach_overflow)}}));
    if (ev.gnb_failure) write(gnb_->name(), point("gnb_failure", t, {{"failed", 1.0}}));
  }
}

void SimEngine::record(const SlotEvents& ev) {
  const std::uint64_t t = ev.slot;
  std::string out;
  for (const auto& tx : ev.transmissions)
    out += Line(t, "tx").str("source", tx.source).real("tx_dbm", tx.tx_dbm)
               .real("position_m", tx.position_m).flag("interferer", tx.interferer).done();
  for (const auto& o : ev.rach)
    out += Line(t, "rach").str("source", o.source).num("index", o.index)
               .str("result", to_string(o.result)).num("rnti", o.rnti).done();
  if (ev.rach_overflow) out += Line(t, "overflow").num("dropped", ev.rach_overflow).done();
  if (ev.gnb_failure) out += Line(t, "gnb_failure").str("reason", *ev.gnb_failure).done();
  for (const auto& r : ev.rrc)
    out += Line(t, "rrc").str("source", r.source).flag("accepted", r.accepted)
               .str("reason", r.reason).done();
  for (const auto& d : ev.dci)
    out += Line(t, "dci").num("rnti", d.rnti).num("candidate", d.candidate)
               .num("rb_start", d.rb_start).num("rb_len", d.rb_len).num("mcs", d.mcs).done();
  for (const auto& l : ev.links) {
    Line line(t, "link");
    line.str("ue", l.ue).num("rnti", l.rnti).real("rx_dbm", l.rx_dbm);
    if (l.interference_dbm) line.real("interference_dbm", *l.interference_dbm);
    out += line.real("sinr_db", l.sinr_db).done();
  }
  for (const auto& e : ev.ue_events)
    out += Line(t, "ue").str("kind", to_string(e.kind)).str("ue", e.ue).num("rnti", e.rnti).done();

  Fnv1a64 h;
  for (int shift = 56; shift >= 0; shift -= 8) h.byte(static_cast<std::uint8_t>(digest_ >> shift));
  h.update(out);
  digest_ = h.value();
  if (trace_ && !out.empty()) *trace_ << out;
}

}  // namespace ranharness::ransim
