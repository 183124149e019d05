#pragma once

// Convenience include for the whole toolkit.

#include "cornfield/common.hpp"
#include "cornfield/conditions.hpp"
#include "cornfield/distribution.hpp"
#include "cornfield/ingest.hpp"
#include "cornfield/measures.hpp"
#include "cornfield/oracle.hpp"
