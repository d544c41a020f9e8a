#ifndef SRB_SRB_HPP
#define SRB_SRB_HPP

#include "srb/codec.hpp"
#include "srb/error.hpp"
#include "srb/fixture.hpp"
#include "srb/geometry.hpp"
#include "srb/harness.hpp"
#include "srb/mesh.hpp"
#include "srb/message.hpp"
#include "srb/node.hpp"
#include "srb/robot.hpp"
#include "srb/scene.hpp"
#include "srb/tf_buffer.hpp"
#include "srb/transport.hpp"
#include "srb/urdf.hpp"
#include "srb/xml.hpp"

#endif
