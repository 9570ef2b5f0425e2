#pragma once

#include "vhfriction/core.hpp"
#include "vhfriction/frictionmodel.hpp"
#include "vhfriction/grasping.hpp"
#include "vhfriction/haptics.hpp"
#include "vhfriction/json_io.hpp"
#include "vhfriction/kdtree.hpp"
#include "vhfriction/mesh.hpp"
#include "vhfriction/pipeline.hpp"
#include "vhfriction/ply.hpp"
#include "vhfriction/pointcloud.hpp"
#include "vhfriction/scene.hpp"
#include "vhfriction/segmentation.hpp"
#include "vhfriction/wrench_hull.hpp"
