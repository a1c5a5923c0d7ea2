// SPDX-License-Identifier: GPL-2.0-or-later
/*
 * zswap.c - compressed cache for swap pages
 */

#include <linux/module.h>
#include <linux/cpu.h>
#include <linux/crypto.h>
#include <linux/mm_types.h>
#include <linux/percpu.h>

#define ZSWAP_MAX_DST (PAGE_SIZE * 2)

/* Per-cpu scratch buffer for compression output. */
static DEFINE_PER_CPU(u8 *, zswap_dstmem);

/*
 * One compression pool: a zpool plus one transform per CPU.
 */
struct zswap_pool {
	struct zpool *zpool;
	struct crypto_comp * __percpu *tfm;
	struct kref kref;
	char tfm_name[CRYPTO_MAX_ALG_NAME];
};

/*
 * Compressed copy of one swapped-out page.
 */
struct zswap_entry {
	struct rb_node rbnode;
	pgoff_t offset;
	int refcount;
	unsigned int length;
	struct zswap_pool *pool;
	unsigned long handle;
};

static int zswap_dstmem_prepare(unsigned int cpu)
{
	u8 *dst;

	dst = kmalloc_node(ZSWAP_MAX_DST, GFP_KERNEL, cpu_to_node(cpu));
	if (!dst)
		return -ENOMEM;

	per_cpu(zswap_dstmem, cpu) = dst;
	return 0;
}

static struct zswap_pool *zswap_pool_current_get(void)
{
	struct zswap_pool *pool;

	rcu_read_lock();
	pool = __zswap_pool_current();
	if (!zswap_pool_get(pool))
		pool = NULL;
	rcu_read_unlock();

	return pool;
}

/*
 * Compress one page into the per-cpu buffer and store the result in the
 * pool. Runs in preemptible context.
 */
static int zswap_frontswap_store(unsigned type, pgoff_t offset,
				struct page *page)
{
	struct zswap_entry *entry;
	struct crypto_comp *tfm;
	unsigned int dlen = PAGE_SIZE;
	u8 *src, *dst;
	int ret;

	entry = zswap_entry_cache_alloc(GFP_KERNEL);
	if (!entry)
		return -ENOMEM;
	entry->pool = zswap_pool_current_get();

	dst = get_cpu_var(zswap_dstmem);
	tfm = *get_cpu_ptr(entry->pool->tfm);
	src = kmap_atomic(page);
	ret = crypto_comp_compress(tfm, src, PAGE_SIZE, dst, &dlen);
	kunmap_atomic(src);
	put_cpu_ptr(entry->pool->tfm);
	if (ret) {
		ret = -EINVAL;
		goto put_dstmem;
	}

	ret = zpool_malloc(entry->pool->zpool, dlen, GFP_NOWAIT, &entry->handle);
	if (ret)
		goto put_dstmem;
	zswap_write_compressed(entry, dst, dlen);
	put_cpu_var(zswap_dstmem);

	entry->offset = offset;
	entry->length = dlen;
	return 0;

put_dstmem:
	put_cpu_var(zswap_dstmem);
	zswap_entry_cache_free(entry);
	return ret;
}

static int zswap_frontswap_load(unsigned type, pgoff_t offset,
				struct page *page)
{
	struct zswap_entry *entry;
	struct crypto_comp *tfm;
	unsigned int dlen = PAGE_SIZE;
	u8 *src, *dst;
	int ret;

	entry = zswap_entry_find_get(type, offset);
	if (!entry)
		return -1;

	src = zpool_map_handle(entry->pool->zpool, entry->handle, ZPOOL_MM_RO);
	dst = kmap_atomic(page);
	tfm = *get_cpu_ptr(entry->pool->tfm);
	ret = crypto_comp_decompress(tfm, src, entry->length, dst, &dlen);
	put_cpu_ptr(entry->pool->tfm);
	kunmap_atomic(dst);
	zpool_unmap_handle(entry->pool->zpool, entry->handle);
	BUG_ON(ret);

	zswap_entry_put(entry);
	return 0;
}
