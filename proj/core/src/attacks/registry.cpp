#include "ranharness/attacks/registry.hpp"

#include "ranharness/attacks/builtin.hpp"

namespace ranharness::attacks {

namespace {

template <class T>
Factory make() {
  return [] { return std::make_unique<T>(); };
}

Registry make_builtin() {
  Registry r;
  const auto& base = config::KindCatalog::builtin();
  auto schema = [&](std::string_view kind) { return *base.find(kind); };
  r.add(std::string(config::kinds::gnb), schema(config::kinds::gnb), nullptr);
  r.add(std::string(config::kinds::ue), schema(config::kinds::ue), nullptr);
  r.add(std::string(config::kinds::jammer), schema(config::kinds::jammer), make<Jammer>());
  r.add(std::string(config::kinds::rrc_fuzzer), schema(config::kinds::rrc_fuzzer), make<RrcFuzzer>());
  r.add(std::string(config::kinds::rach_flooder), schema(config::kinds::rach_flooder),
        make<RachFlooder>());
  r.add(std::string(config::kinds::dci_sniffer), schema(config::kinds::dci_sniffer),
        make<DciSniffer>());
  r.add(std::string(config::kinds::iq_collector), schema(config::kinds::iq_collector),
        make<IqCollector>());
  return r;
}

}  // namespace

const Registry& Registry::builtin() {
  static const Registry registry = make_builtin();
  return registry;
}

Registry& Registry::add(std::string kind, config::KindSchema schema, Factory factory) {
  catalog_.add(kind, std::move(schema));
  if (factory)
    factories_.insert_or_assign(std::move(kind), std::move(factory));
  else
    factories_.erase(kind);
  return *this;
}

std::unique_ptr<Component> Registry::create(const std::string& kind) const {
  auto it = factories_.find(kind);
  return it == factories_.end() ? nullptr : it->second();
}

bool is_engine_native(const std::string& kind) {
  return kind == config::kinds::gnb || kind == config::kinds::ue;
}

}  // namespace ranharness::attacks
