from .model import (
    Action,
    Atom,
    CLASS_ALERT,
    CLASS_AUTOMATIC,
    CLASS_DISABLE,
    CLASS_LAUNCH,
    CLASS_REMINDER,
    COMMAND_CLASSES,
    FuzzyRule,
    ObjectRef,
    RuleBase,
    decompose_mimo,
)
from .parser import RulebookError, parse_rulebook
from .serializer import serialize
from .validate import Diagnostic, validate
from .defaults import (
    EXIT_INTENT_RULE_IDS,
    PROXIMITY_RULE_BY_OBJECT,
    SCHEDULE_RULE_ID_BASE,
    ZONE_RULE_ID_BASE,
    default_rulebook,
    default_rules_text,
    proximity_fixture_rulebase,
    zone_alert_rule,
)

__all__ = [
    "Action",
    "Atom",
    "CLASS_ALERT",
    "CLASS_AUTOMATIC",
    "CLASS_DISABLE",
    "CLASS_LAUNCH",
    "CLASS_REMINDER",
    "COMMAND_CLASSES",
    "Diagnostic",
    "EXIT_INTENT_RULE_IDS",
    "FuzzyRule",
    "ObjectRef",
    "PROXIMITY_RULE_BY_OBJECT",
    "RuleBase",
    "RulebookError",
    "SCHEDULE_RULE_ID_BASE",
    "ZONE_RULE_ID_BASE",
    "decompose_mimo",
    "default_rulebook",
    "default_rules_text",
    "parse_rulebook",
    "proximity_fixture_rulebase",
    "serialize",
    "validate",
    "zone_alert_rule",
]
