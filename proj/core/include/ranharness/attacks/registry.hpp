#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "ranharness/attacks/component.hpp"
#include "ranharness/config/schema.hpp"

namespace ranharness::attacks {

using Factory = std::function<std::unique_ptr<Component>()>;

/// Maps kind strings to parameter schemas and component factories. Adding an
/// attack means implementing Component and calling add().
class Registry {
 public:
  /// Every built-in kind. gnb and ue have schemas but no factory: the
  /// simulation hosts them natively.
  static const Registry& builtin();

  Registry& add(std::string kind, config::KindSchema schema, Factory factory);

  const config::KindCatalog& catalog() const { return catalog_; }
  bool has_factory(const std::string& kind) const { return factories_.count(kind) > 0; }
  /// Null for engine-native or unknown kinds.
  std::unique_ptr<Component> create(const std::string& kind) const;

 private:
  config::KindCatalog catalog_;
  std::map<std::string, Factory> factories_;
};

bool is_engine_native(const std::string& kind);

}  // namespace ranharness::attacks
