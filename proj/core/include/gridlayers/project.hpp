#pragma once

#include "gridlayers/interaction.hpp"
#include "gridlayers/scene.hpp"
#include "gridlayers/workbook.hpp"

namespace gridlayers {

/// Render description of one moment of a session. Pure: identical inputs
/// give identical frames. `revision` is stamped by the caller.
SceneFrame project(const Workbook& wb, const Viewport& viewport, const InteractionState& state,
                   const ArcToggles& toggles);

/// Same, using the viewport and toggles held by the state.
SceneFrame project(const Workbook& wb, const InteractionState& state);

}  // namespace gridlayers
