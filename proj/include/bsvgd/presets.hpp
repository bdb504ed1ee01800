#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsvgd {

/// Names of the embedded run configs: "paper-gauss25", "paper-banana3".
std::vector<std::string> preset_names();

/// Full config text of a named preset.
std::optional<std::string_view> preset_text(std::string_view name);

}  // namespace bsvgd
