//! Pinned vocabulary. IRIs are kept in compact `prefix:local` form; the
//! `rvm:` prefix denotes the `http://example.com/rvm#` namespace.

pub const RVM_NAMESPACE: &str = "http://example.com/rvm#";

pub const RDF_TYPE: &str = "rdf:type";
pub const RDF_FIRST: &str = "rdf:first";
pub const RDF_REST: &str = "rdf:rest";
pub const RDF_NIL: &str = "rdf:nil";
pub const RDF_LANG_STRING: &str = "rdf:langString";
pub const RDFS_SUBCLASS_OF: &str = "rdfs:subClassOf";

pub const XSD_STRING: &str = "xsd:string";
pub const XSD_INT: &str = "xsd:int";
pub const XSD_INTEGER: &str = "xsd:integer";
pub const XSD_DOUBLE: &str = "xsd:double";
pub const XSD_BOOLEAN: &str = "xsd:boolean";

/// The reserved default graph.
pub const RVM_DEFAULT_GRAPH: &str = "rvm:default";
/// Graph holding memoization records.
pub const RVM_MEMO_GRAPH: &str = "rvm:memo";
/// Graph holding compiled API templates (classes, methods, instructions).
pub const RVM_API_GRAPH: &str = "rvm:api";

pub const RVM_CLASS: &str = "rvm:Class";
pub const RVM_METHOD: &str = "rvm:Method";

pub const RVM_RVM: &str = "rvm:RVM";
pub const RVM_NEXT_INST: &str = "rvm:nextInst";
pub const RVM_VALUE: &str = "rvm:value";
pub const RVM_SYMBOL: &str = "rvm:symbol";
pub const RVM_PREDICATE: &str = "rvm:predicate";
pub const RVM_INVOKE_METHOD: &str = "rvm:invokeMethod";
pub const RVM_BRANCH_TRUE: &str = "rvm:branchTrue";
pub const RVM_BRANCH_FALSE: &str = "rvm:branchFalse";
pub const RVM_HAS_METHOD: &str = "rvm:hasMethod";
pub const RVM_FIRST_INST: &str = "rvm:firstInst";
pub const RVM_PARAM: &str = "rvm:param";
pub const RVM_OWNER: &str = "rvm:owner";
pub const RVM_SPAWNED_BY: &str = "rvm:spawnedBy";

pub const RVM_PROGRAM_LOCATION: &str = "rvm:programLocation";
pub const RVM_OPERAND_STACK: &str = "rvm:operandStack";
pub const RVM_RETURN_STACK: &str = "rvm:returnStack";
pub const RVM_FRAME_STACK: &str = "rvm:frameStack";
pub const RVM_HAS_SYMBOL: &str = "rvm:hasSymbol";
pub const RVM_HAS_VALUE: &str = "rvm:hasValue";
pub const RVM_FROM_BLOCK: &str = "rvm:fromBlock";
pub const RVM_NEEDS_PROCESS: &str = "rvm:needsProcess";
pub const RVM_CYCLES_REMAINING: &str = "rvm:cyclesRemaining";
pub const RVM_FAULT: &str = "rvm:fault";

// Memoization records (reified, see rvm:memo graph).
pub const RVM_FUNCTION: &str = "rvm:function";
pub const RVM_INPUT: &str = "rvm:input";
pub const RVM_OUTPUT: &str = "rvm:output";

// Extensions beyond the core vocabulary; see rvm-vocab.nq.
pub const RVM_HAS_FIELD: &str = "rvm:hasField";
pub const RVM_RANGE: &str = "rvm:range";
pub const RVM_MIN_CARD: &str = "rvm:minCard";
pub const RVM_MAX_CARD: &str = "rvm:maxCard";
pub const RVM_METHOD_NAME: &str = "rvm:methodName";
pub const RVM_RETURN_TYPE: &str = "rvm:returnType";
pub const RVM_RETURNS_VALUE: &str = "rvm:returnsValue";
pub const RVM_INSTANCE_OF: &str = "rvm:instanceOf";
pub const RVM_BINDINGS: &str = "rvm:bindings";
pub const RVM_MEMBER: &str = "rvm:member";
pub const RVM_VALUE_SET: &str = "rvm:ValueSet";
