/** Wire types mirroring the read-only stepgate API (schema_version 1). */
export {};
