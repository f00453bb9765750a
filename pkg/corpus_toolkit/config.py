# Special tokens, in id order
PAD_TOKEN = "<pad>"
BOS_TOKEN = "<bos>"
EOS_TOKEN = "</s>"  # realizes the embedding anchor token
UNK_TOKEN = "<unk>"
SEP_TOKEN = "<sep>"  # separates input text from a prompt
SPECIAL_TOKENS = (PAD_TOKEN, BOS_TOKEN, EOS_TOKEN, UNK_TOKEN, SEP_TOKEN)

WORD_MARKER = "▁"

DEFAULT_MAX_VOCAB = 1024

# Function words used by the synthetic templates
FUNCTION_WORDS = ("the", "of", "is", "what", "?", ".", "has", "equals", "for", "and")
