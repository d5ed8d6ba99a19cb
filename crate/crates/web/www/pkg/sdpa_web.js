/* @ts-self-types="./sdpa_web.d.ts" */

export class EnsembleDemo {
    static __wrap(ptr) {
        const obj = Object.create(EnsembleDemo.prototype);
        obj.__wbg_ptr = ptr;
        EnsembleDemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        EnsembleDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_ensembledemo_free(ptr, 0);
    }
    /**
     * @param {number} i
     * @returns {Uint8Array}
     */
    candidate_rgba(i) {
        const ret = wasm.ensembledemo_candidate_rgba(this.__wbg_ptr, i);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Whole-image composite score of each candidate and then of the output.
     * @returns {Float64Array}
     */
    composites() {
        const ret = wasm.ensembledemo_composites(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Uint8Array}
     */
    noisy_rgba() {
        const ret = wasm.ensembledemo_noisy_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {Uint8Array}
     */
    output_rgba() {
        const ret = wasm.ensembledemo_output_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {number}
     */
    size() {
        const ret = wasm.ensembledemo_size(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Each pixel tinted by the candidate that won the last patch covering it.
     * @returns {Uint8Array}
     */
    winner_rgba() {
        const ret = wasm.ensembledemo_winner_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {Uint32Array}
     */
    wins() {
        const ret = wasm.ensembledemo_wins(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
}
if (Symbol.dispose) EnsembleDemo.prototype[Symbol.dispose] = EnsembleDemo.prototype.free;

export class FusionDemo {
    static __wrap(ptr) {
        const obj = Object.create(FusionDemo.prototype);
        obj.__wbg_ptr = ptr;
        FusionDemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        FusionDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_fusiondemo_free(ptr, 0);
    }
    /**
     * @returns {Uint8Array}
     */
    clean_rgba() {
        const ret = wasm.fusiondemo_clean_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {number}
     */
    fused_mse() {
        const ret = wasm.fusiondemo_fused_mse(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Uint8Array}
     */
    fused_rgba() {
        const ret = wasm.fusiondemo_fused_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Mean over all slices of MSE(noisy, clean).
     * @returns {number}
     */
    noisy_mse() {
        const ret = wasm.fusiondemo_noisy_mse(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Uint8Array}
     */
    noisy_rgba() {
        const ret = wasm.fusiondemo_noisy_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {number}
     */
    size() {
        const ret = wasm.fusiondemo_size(this.__wbg_ptr);
        return ret >>> 0;
    }
}
if (Symbol.dispose) FusionDemo.prototype[Symbol.dispose] = FusionDemo.prototype.free;

export class ScaleDemo {
    static __wrap(ptr) {
        const obj = Object.create(ScaleDemo.prototype);
        obj.__wbg_ptr = ptr;
        ScaleDemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        ScaleDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_scaledemo_free(ptr, 0);
    }
    /**
     * @returns {Uint8Array}
     */
    after_rgba() {
        const ret = wasm.scaledemo_after_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {Uint8Array}
     */
    before_rgba() {
        const ret = wasm.scaledemo_before_rgba(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {number | undefined}
     */
    cnr_after() {
        const ret = wasm.scaledemo_cnr_after(this.__wbg_ptr);
        return ret[0] === 0 ? undefined : ret[1];
    }
    /**
     * @returns {number | undefined}
     */
    cnr_before() {
        const ret = wasm.scaledemo_cnr_before(this.__wbg_ptr);
        return ret[0] === 0 ? undefined : ret[1];
    }
    /**
     * @returns {number}
     */
    size() {
        const ret = wasm.scaledemo_size(this.__wbg_ptr);
        return ret >>> 0;
    }
}
if (Symbol.dispose) ScaleDemo.prototype[Symbol.dispose] = ScaleDemo.prototype.free;

/**
 * Denoises one speckled slice with median and gaussian filters and merges
 * them patch by patch under the given metric weights.
 * @param {number} size
 * @param {number} looks
 * @param {bigint} seed
 * @param {number} k
 * @param {number} stride
 * @param {number} w_cnr
 * @param {number} w_msr
 * @param {number} w_tp
 * @param {number} w_ep
 * @returns {EnsembleDemo}
 */
export function ensemble_demo(size, looks, seed, k, stride, w_cnr, w_msr, w_tp, w_ep) {
    const ret = wasm.ensemble_demo(size, looks, seed, k, stride, w_cnr, w_msr, w_tp, w_ep);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return EnsembleDemo.__wrap(ret[0]);
}

/**
 * Simulates a speckled volume and fuses its middle slice with its neighbours.
 * @param {number} size
 * @param {number} slices
 * @param {number} looks
 * @param {bigint} seed
 * @param {number} radius
 * @param {number} h
 * @returns {FusionDemo}
 */
export function fusion_demo(size, slices, looks, seed, radius, h) {
    const ret = wasm.fusion_demo(size, slices, looks, seed, radius, h);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return FusionDemo.__wrap(ret[0]);
}

/**
 * Squeezes a speckled slice into `[lo, hi]` and stretches it back with the
 * min-max color scaling.
 * @param {number} size
 * @param {bigint} seed
 * @param {number} lo
 * @param {number} hi
 * @returns {ScaleDemo}
 */
export function scale_demo(size, seed, lo, hi) {
    const ret = wasm.scale_demo(size, seed, lo, hi);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return ScaleDemo.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./sdpa_web_bg.js": import0,
    };
}

const EnsembleDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_ensembledemo_free(ptr, 1));
const FusionDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_fusiondemo_free(ptr, 1));
const ScaleDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_scaledemo_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

function getArrayU32FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint32ArrayMemory0().subarray(ptr / 4, ptr / 4 + len);
}

function getArrayU8FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint8ArrayMemory0().subarray(ptr / 1, ptr / 1 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint32ArrayMemory0 = null;
function getUint32ArrayMemory0() {
    if (cachedUint32ArrayMemory0 === null || cachedUint32ArrayMemory0.byteLength === 0) {
        cachedUint32ArrayMemory0 = new Uint32Array(wasm.memory.buffer);
    }
    return cachedUint32ArrayMemory0;
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint32ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('sdpa_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
