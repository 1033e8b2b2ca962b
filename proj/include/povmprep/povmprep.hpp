#pragma once

#include "povmprep/basis.hpp"
#include "povmprep/errors.hpp"
#include "povmprep/preparation.hpp"
#include "povmprep/purity.hpp"
#include "povmprep/repeated.hpp"
#include "povmprep/settings.hpp"
#include "povmprep/smallmat.hpp"
